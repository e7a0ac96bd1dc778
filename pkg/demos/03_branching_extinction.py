"""Branching Brownian motion: simulated trees against the exact answer.

A particle dies after an Exp(gamma) lifetime and leaves 0 children with
probability alpha or 2 with probability 1 - alpha.  The probability
that the whole population is gone by time tau has the closed form
implemented in heatfield.dyson; here we watch a Monte Carlo ensemble
converge to it, and print a couple of whole event trees for flavor.

Run:  python demos/03_branching_extinction.py
"""

import numpy as np

import heatfield as hf

alpha, gamma = 0.25, 1.0
config = hf.BranchingConfig(gamma, hf.FertilityDistribution.binary(alpha), max_particles=10_000)

print(f"binary law: dies with p = {alpha}, splits with p = {1 - alpha}; clock rate {gamma}")
print(f"eventual extinction probability: alpha/(1-alpha) = {hf.extinction_probability(alpha):.6f}\n")

print("two event trees (seed 1, replicas 0 and 3):")
for replica in (0, 3):
    log = hf.simulate_branching(config, 4.0, sample_times=(0.0, 2.0, 4.0), seed=1, replica=replica)
    print(f"  replica {replica}: population at t = 0, 2, 4 -> {list(log.counts)}")
    for event in log.events[:6]:
        kids = f"children {list(event.children)}" if event.children else "no children"
        print(f"    t = {event.time:.3f}  particle {event.parent} dies at x = {event.position[0]:+.3f}, {kids}")
    if len(log.events) > 6:
        print(f"    ... {len(log.events) - 6} more events")

print("\nextinction curve, 5000 replicas vs closed form:")
times = hf.sample_extinction_times(config, horizon=30.0, replicas=5000, seed=11)
print("  tau   simulated   exact")
for tau in (1.0, 2.0, 5.0, 10.0, 30.0):
    mc = float(np.mean(times <= tau))
    exact = hf.one_point_closed_form(alpha, gamma, tau)
    print(f"  {tau:4}  {mc:.4f}      {exact:.4f}")

print("\ngenerating function of the population size, theta = 0.5, t = 1:")
est, err = hf.estimate_generating_function(config, 0.5, 1.0, replicas=5000, seed=4)
ode = hf.one_point_ode(hf.FertilityDistribution.binary(alpha), gamma, 0.5, 1.0)
print(f"  Monte Carlo mean of theta^N: {est:.4f} +- {err:.4f}")
print(f"  dual ODE solution:           {ode.values[-1]:.4f}")
