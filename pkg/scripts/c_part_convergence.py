"""Show how the contribution of the c part to a k-cycle trace dies off as it is split over more labels.

Splitting ``c`` over ``ell`` zero labels adds ``ell * (c / ell) ** k`` to the
trace of a k-cycle; the diffuse label is the ``ell -> infinity`` limit.
"""

from thoma_lab.symgroup import Permutation
from thoma_lab.tensor_model import ModelSpace, represent, trace
from thoma_lab.thoma import ThomaParams, character

PARAMS = ThomaParams.parse(["1/2"])


def main():
    print(f"params {PARAMS}  c = {PARAMS.c}")
    for k in (2, 3, 4):
        cycle = Permutation.from_cycles(tuple(range(k)))
        limit = character(PARAMS, cycle)
        cells = []
        for ell in (1, 2, 4, 8, 16, 32):
            sp = ModelSpace.from_params(PARAMS, k, zero_labels=ell)
            cells.append(f"{ell}:{trace(sp, represent(sp, cycle)) - limit}")
        print(f"k={k}  limit {limit}  residual by ell  " + "  ".join(cells))


if __name__ == "__main__":
    main()
