"""Index table of the rotation path R(t)^n on [0, pi], where the inequality
mu + S^+ >= 0 is an equality."""

from brake_index.core import n_transform
from brake_index.index import index_lagrangian, index_omega, mixed_concavity, splitting_numbers
from brake_index.paths import brake_iterate, rotation_path

print(f"{'n':>2} {'i_L0':>5} {'nu_L0':>6} {'i_L1':>5} {'nu_L1':>6} {'i':>3} {'S+':>3} "
      f"{'mu01+S':>7} {'mu10+S':>7}")
for n in range(1, 6):
    p = rotation_path(n)
    a, b, w = index_lagrangian(p, 0), index_lagrangian(p, 1), index_omega(p, 1.0)
    S = splitting_numbers(n_transform(p.end), 1.0, witness=brake_iterate(p, 2)).s_plus
    mc = mixed_concavity(p)
    print(f"{n:>2} {a.i:>5} {a.nu:>6} {b.i:>5} {b.nu:>6} {w.i:>3} {S:>3} "
          f"{mc['mu_01'] + S:>7} {mc['mu_10'] + S:>7}")
