#!/usr/bin/env python3
"""Regenerate the golden data files under src/gshe/data/.

The basis file freezes the enumeration of the 54 paired symbols; the two
expansion files freeze eight times the distinguished curvature vectors.
Run from the repository root after any change to the canonical encoding.
"""

import pathlib

from gshe.algebra import format_lincomb
from gshe.graphs import format_graph
from gshe.morphisms import tau_c, tau_star
from gshe.symbols import full_basis

DATA = pathlib.Path(__file__).resolve().parent.parent / "src/gshe/data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    basis = full_basis()
    (DATA / "basis.txt").write_text(
        "\n\n".join(format_graph(g) for g in basis) + "\n")
    (DATA / "tau_star.txt").write_text(format_lincomb(8 * tau_star()) + "\n")
    (DATA / "tau_c.txt").write_text(format_lincomb(8 * tau_c()) + "\n")
    print(f"wrote {len(basis)} symbols and two expansions to {DATA}")


if __name__ == "__main__":
    main()
