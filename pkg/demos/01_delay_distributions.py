"""
Working with discrete delay distributions
=========================================

Every timing quantity in this package is a finite distribution over
delay values in milliseconds. This walk-through builds a few by hand,
combines them the two ways pipeline stages combine (one after another,
and racing in parallel), and checks the algebra against brute-force
sampling.
"""

import numpy as np

from pipedelay import DelayDist, convolve_all, max_combine, summarize

# A stage that takes 5 ms three quarters of the time and 9 ms otherwise.
fetch = DelayDist.from_points([(5.0, 0.75), (9.0, 0.25)])

# Stages measured in the field arrive as raw samples; from_samples bins
# them (1 ms bins by default) into the same representation.
rng = np.random.default_rng(0)
samples = rng.normal(22.0, 1.5, size=5000)
infer = DelayDist.from_samples(samples)

display = DelayDist.constant(4.0)

print("fetch  :", fetch.points())
print("infer  :", summarize(infer))
print("display:", display.points())

# Sequential composition is convolution: total = fetch + infer + display.
total = convolve_all([fetch, infer, display])
print("\nsequential total:", summarize(total))

# Parallel composition (threads racing to a barrier) keeps the slowest:
# the combined CDF is the product of the CDFs.
slowest = max_combine([fetch, infer, display])
print("parallel  slowest:", summarize(slowest))

# Quantiles read off the staircase CDF directly.
for q in (0.5, 0.9, 0.99):
    print(f"total p{int(q * 100):<2}: {total.quantile(q):.1f} ms")

# Sampling agreement: 200k draws from the convolved distribution land on
# the same mean as summing independent draws from the parts.
n = 200_000
direct = total.sample_array(rng, n)
parts = (fetch.sample_array(rng, n) + infer.sample_array(rng, n)
         + display.sample_array(rng, n))
print(f"\nsampled mean (convolved) : {direct.mean():.3f} ms")
print(f"sampled mean (summed)    : {parts.mean():.3f} ms")
print(f"analytic mean            : {total.mean():.3f} ms")
