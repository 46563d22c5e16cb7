"""A zero-energy kernel and the block structure of the low-energy inverse.

A compactly supported attractive bump is tuned until P-hat(0) acquires a
kernel.  Bordering by the kernel and cokernel vectors gives a Grushin problem
whose inverse has bounded blocks except the one carrying the 1/sigma blow-up.
"""

from conicres.grushin import block_scaling, pairing_check, tune_kernel

setup = tune_kernel()
print(f"tuned coupling {setup.coupling:.6f}, singular value ratio {setup.sv_ratio:.1e}")
print(f"kernel decays like x^{setup.kernel_power:.3f}")

sigmas = (1e-2, 10 ** -2.5, 1e-3, 10 ** -3.5, 1e-4)
blocks = block_scaling(setup, sigmas)
print("log-log slopes of the inverse blocks:", ", ".join(f"{s:+.3f}" for s in blocks.slopes))
print(f"Schur complement slope {blocks.block11_slope:.4f}")

pair = pairing_check(setup, sigmas)
print(f"pairing defect slope {pair.defect_slope:.2f}; decay gain {pair.decay_gain:.2f}")
