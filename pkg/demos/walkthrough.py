"""A tour of the library on the Gevrey weight omega(t) = t^(1/2).

Run with ``python demos/walkthrough.py``.
"""

import numpy as np

from ultraspace import (analyze, audit_weight_matrix, gevrey, hermite_membership_test, matrix_from_weight,
                        nuclearity_verdict, random_expansion, seminorm, validate_weight_function,
                        verify_T_continuity, verify_Tinv_continuity, young_conjugate)


def main() -> None:
    w = gevrey(2)
    print(f"weight {w.name}: {validate_weight_function(w).verdict.value}")

    yc = young_conjugate(w, 20.0)
    s = np.array([1.0, 5.0, 20.0])
    print("phi* at", s.tolist(), "->", np.round(yc(s), 6).tolist())

    M = matrix_from_weight(w)
    audit = audit_weight_matrix(M)
    print("matrix audit:", ", ".join(f"{r.condition_id}={r.verdict.value}" for r in audit.sub_reports))
    for mode in ("roumieu", "beurling"):
        print(f"Hermite membership ({mode}):", hermite_membership_test(M, mode).verdict.value)

    f = random_expansion(1, 6, 0)
    xi = analyze(f)
    print("largest coefficient:", max(abs(c) for c in xi.coeffs.values()))
    r = seminorm(f, M.sequence(1.0), 1.0)
    print(f"seminorm at lambda=1, h=1: {r.value:.6g} ({r.status})")
    for mode in ("roumieu", "beurling"):
        t = verify_T_continuity(f, M, mode)
        ti = verify_Tinv_continuity(f, M, mode)
        print(f"{mode}: analysis bound {t.verdict.value}, synthesis bound {ti.verdict.value}")

    for mode in ("roumieu", "beurling"):
        rep = nuclearity_verdict(M, mode)
        print(f"nuclearity ({mode}): {rep.verdict.value} via {rep.route}")


if __name__ == "__main__":
    main()
