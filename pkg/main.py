# -*- coding: UTF8 -*-

import sys

from sbm_gft.cli import main


if __name__ == "__main__":
    sys.exit(main())
