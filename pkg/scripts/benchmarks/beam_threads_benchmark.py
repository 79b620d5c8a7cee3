"""
Compare single-threaded and threaded beam search on the rotating pair,
and time the acceptance runs that have a runtime target.
"""
import logging
import sys
import time

import numpy as np
from dotenv import load_dotenv

load_dotenv()

from switchgrade.barabanov import cgm_alpha
from switchgrade.catalog import LOG4_OVER_PI, system_B_prime
from switchgrade.config import get_threads
from switchgrade.lyapunov import default_grid, lambda_lower_product_search

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s')


def timed(label, fn):
    start = time.time()
    result = fn()
    duration = time.time() - start
    print(f"✓ {label} completed in {duration:.2f} seconds")
    return result, duration


sys_b = system_B_prime()
grid = default_grid(64)
threads = get_threads()

print("\n" + "=" * 60)
print("Product search, 1 worker vs SWITCHGRADE_THREADS")
print("=" * 60)
single, single_time = timed("1 worker", lambda: lambda_lower_product_search(sys_b, 16 * np.pi, grid, 64, workers=1))
threaded, threaded_time = timed(f"{threads} workers",
                                lambda: lambda_lower_product_search(sys_b, 16 * np.pi, grid, 64, workers=threads))

if single.lower != threaded.lower:
    print(f"\n❌ Results differ: {single.lower!r} vs {threaded.lower!r}")
    sys.exit(1)
print(f"  lower bound {single.lower:.9f} (log 4/pi = {LOG4_OVER_PI:.9f})")
print(f"Speedup: {single_time / threaded_time:.2f}x")

print("\n" + "=" * 60)
print("Runtime targets")
print("=" * 60)
product_time = threaded_time
alpha, cgm_time = timed("cgm_alpha", cgm_alpha)
print(f"  alpha = {alpha:.6f}")

failures = []
if product_time >= 60:
    failures.append(f"product search took {product_time:.1f}s (target < 60s)")
if cgm_time >= 10:
    failures.append(f"cgm_alpha took {cgm_time:.1f}s (target < 10s)")

if failures:
    for failure in failures:
        print(f"⚠️  {failure}")
    sys.exit(1)
print("\n✅ All runtime targets met")
