"""Degenerate charge families of symmetry-resolved probabilities.

At a Z_N x Z_N fixed point labeled by m, the defect partition functions
Z_g vanish outside a subgroup H, charges with equal characters on H form
degenerate families of S_1(Q), and a drive pumping charge c permutes the
family labels modulo d = gcd(N, m).
"""

import numpy as np

from floquet_sre import cohomology as coh

for n, m in ((2, 1), (4, 2), (6, 3)):
    group = coh.AbelianGroup((n, n))
    spt = coh.SPTClass.from_label(group, m)
    table = coh.defect_table(group, spt)
    part = coh.families(group, spt, table)

    beta = coh.random_coboundary(group, np.random.default_rng(1))
    generic = coh.sym_resolved_from_defects(coh.defect_table(group, spt, beta))
    sig = coh.signature(generic)

    print(f"G = Z_{n} x Z_{n}, m = {m}: d = {part.d}, |H| = {len(table.h_subgroup)}, "
          f"{len(part.families)} families")
    print(f"  signature {sig} (closed form {coh.closed_form_signature(group, m)})")
    print(f"  base family F(0,0) = {sorted(part.families[min(part.families)])}")
    perm = coh.cycle_families(part, (1, 0))
    moved = {a: b for a, b in perm.items() if a != b}
    if moved:
        print(f"  pumping c = (1, 0) cycles {len(moved)} of {len(perm)} labels, "
              f"e.g. F{min(moved)} -> F{moved[min(moved)]}")
    else:
        print(f"  pumping c = (1, 0) acts trivially: charges are seen only mod d = {part.d}")
    print()

h2, total = coh.fspt_count(coh.AbelianGroup((2, 2)))
print(f"Z_2 x Z_2 supports {h2} static classes and {total} driven phases;")
for n in range(2, 7):
    print(f"  Z_{n}: {coh.fspt_count(coh.AbelianGroup((n,)))[1]} driven phases "
          f"(no static order)")
