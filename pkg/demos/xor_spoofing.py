"""On the XOR channel a uniform spoof pair makes three scenarios indistinguishable.

Whatever the decoder does, the three scenario error sums add up to at least
(N1 - 1) / (2 N1), so one of them is at least a third of that.
"""

import numpy as np

from byzmac.attack import SpoofPair, converse_bound_eval, spoof_output_dists
from byzmac.codec import DecoderParams, feasibility_decoder, generate_constant_composition_codebook
from byzmac.mac_core import builtin_channel

mac = builtin_channel("xor")
code = generate_constant_composition_codebook([0.5, 0.5], [0.5, 0.5], 4, 2, 2, seed=0)
sp = SpoofPair.uniform(mac, 1)

p, pj, q = spoof_output_dists(code, mac, sp, 1, 2, 1)
print("P_121 == P_211 == Q_121:", np.allclose(p, pj) and np.allclose(p, q))
print("every output word has probability", p[0])

dec = feasibility_decoder(code, mac, DecoderParams(0.5))
rep = converse_bound_eval(code, dec, mac, sp)
print(f"scenario sums {rep.p_mal_spoof_a:.4f} + {rep.p_mal_spoof_b:.4f} + {rep.p_mal_spoof_other:.4f} = {rep.lhs:.4f}")
print(f"bound {rep.rhs:.4f}, so the maximal error is at least {rep.pe_lower:.4f}")
