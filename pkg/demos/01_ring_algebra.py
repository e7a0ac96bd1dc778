"""Tour of the split-complex ring that carries heat/antiheat pairs.

Numbers a + I*b with I*I = +1 split along the diagonals into two real
lines, and the two projections onto those lines respect both addition
and multiplication.  That is the whole trick: exponentials, inverses,
and the clock evolution act independently on each diagonal, and the
physical (heat) component is read off with the plus projection.

Run:  python demos/01_ring_algebra.py
"""

import math

from heatfield import pring
from heatfield.pring import I, SIGMA_MINUS, SIGMA_PLUS, PseudoComplex, gamma_minus, gamma_plus

p = PseudoComplex(2.0, 3.0)
q = PseudoComplex(4.0, 5.0)

print("elements           p =", p, "  q =", q)
print("product          p*q =", p * q)
print("diagonals:  gamma+(p)*gamma+(q) =", gamma_plus(p) * gamma_plus(q),
      " -> gamma+(p*q) =", gamma_plus(p * q))
print("            gamma-(p)*gamma-(q) =", gamma_minus(p) * gamma_minus(q),
      " -> gamma-(p*q) =", gamma_minus(p * q))

print("\nidempotents: sigma+^2 =", SIGMA_PLUS * SIGMA_PLUS, "  sigma+*sigma- =", SIGMA_PLUS * SIGMA_MINUS)
print("every element splits: p =", gamma_plus(p), "* sigma+ +", gamma_minus(p), "* sigma-")

print("\nconjugation swaps the diagonals:")
print("  p* =", p.conj(), "  gamma+(p*) =", gamma_plus(p.conj()), "= gamma-(p) =", gamma_minus(p))

print("\nthe exponential acts branch by branch, so exp(p)exp(q) = exp(p+q):")
lhs = pring.exp(p) * pring.exp(q)
rhs = pring.exp(p + q)
print("  exp(p)*exp(q) =", lhs)
print("  exp(p+q)      =", rhs)

print("\nclock evolution U(t) = exp(-I*E*t) is a unitary semigroup:")
for et in (0.5, 1.0, 5.0):
    u = pring.exp(PseudoComplex(0.0, -et))
    unit = u * u.conj()
    print(f"  E*t = {et:4.1f}:  gamma+(U) = {gamma_plus(u):.6f} = exp(-E*t) = {math.exp(-et):.6f}"
          f"   U*conj(U) = {unit}")

print("\nzero divisors sit on the diagonals and cannot be inverted:")
try:
    pring.inverse(SIGMA_PLUS)
except pring.ZeroDivisorError as err:
    print("  inverse(sigma+):", err)

print("\nrandomized identity suite (defects scaled to operand magnitude):")
for name, err in pring.self_check(cases=2000, seed=0).items():
    print(f"  {name:22s} max defect {err:.2e}")
