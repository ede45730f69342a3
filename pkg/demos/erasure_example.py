"""The weight-1 / weight-(n-1) code on the binary erasure MAC.

Exact errors come from enumerating the channel outputs; a Monte Carlo run
with the same code lands inside its confidence interval.
"""

from byzmac.attack import Attack
from byzmac.codec import build_erasure_example_code
from byzmac.mac_core import builtin_channel
from byzmac.sim import exact_attack_error, exact_error_probabilities, monte_carlo_error

mac = builtin_channel("erasure")
n = 8
code, dec = build_erasure_example_code(n)

rep = exact_error_probabilities(code, dec, mac)
print(f"n={n}: P_hon={rep.p_hon:.6f} P_mal1={rep.p_mal1:.6f} P_mal2={rep.p_mal2:.6f}")
print("worst user-1 attack vector:", rep.worst_attack_vectors["1"])

attack = Attack("deterministic_vector", 1, [1, 1] + [0] * (n - 2))
err, _ = exact_attack_error(code, dec, mac, attack)
print(f"weight-2 attack by user 1: error {err}")

mc = monte_carlo_error(code, dec, mac, trials=20_000, seed=0, workers=4)
print(f"Monte Carlo P_hon {mc.p_hon:.4f} +/- {mc.half_widths['p_hon']:.4f}")
