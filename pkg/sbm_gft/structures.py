# -*- coding: UTF8 -*-

number = (int, float)


class Structures:

    sbm_spec_structure = {
        "A": list,
        "mu": list,
        "N": int
    }

    cayley_spec_structure = {
        "group": list,
        "connection": dict
    }

    tolerances_structure = {
        "zero_tol": number,
        "group_tol": number,
        "residual_tol": number
    }

    # Every key of a run configuration is optional ; only the types are enforced.
    experiment_structure = {
        "A": list,
        "mu": list,
        "N": int,
        "group": list,
        "connection": dict,
        "tolerances": dict,
        "epsilons": list,
        "trials": int,
        "signals": int,
        "sizes": list,
        "signal": str,
        "seeds": list
    }

    graph_header_structure = {
        "N": int,
        "k": list,
        "seed": int
    }

    basis_metadata_structure = {
        "spec_hash": str,
        "N": int,
        "k": list,
        "rank": int,
        "tolerances": tolerances_structure
    }

    manifest_structure = {
        "config_hash": str,
        "version": str,
        "wall_clock": number,
        "outputs": dict
    }

    @staticmethod
    def mapping(struct_name) -> dict or None:
        m = {
            "sbm_spec_structure": Structures.sbm_spec_structure,
            "cayley_spec_structure": Structures.cayley_spec_structure,
            "tolerances_structure": Structures.tolerances_structure,
            "experiment_structure": Structures.experiment_structure,
            "graph_header_structure": Structures.graph_header_structure,
            "basis_metadata_structure": Structures.basis_metadata_structure,
            "manifest_structure": Structures.manifest_structure,
        }

        if struct_name in m:
            return m[struct_name]
        else:
            return
