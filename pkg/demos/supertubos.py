"""
Full-size signatures
====================

Key generation takes a few seconds and the public key is about 3 MB.
"""
import time

import numpy as np

from wavelet import keygen, sign
from wavelet.keygen import serialize_pk, serialize_sk
from wavelet.params import SUPERTUBOS, tables_for
from wavelet.sigcodec import CODEC_2TMR, CODEC_3TMR, encode_signature, payload_size
from wavelet.verifier import MemoryRowSource, verify_report

t0 = time.perf_counter()
sk, pk = keygen(bytes(16), SUPERTUBOS)
print(f"keygen {time.perf_counter() - t0:.1f}s")
print("pk", len(serialize_pk(pk)), "bytes, sk", len(serialize_sk(sk)), "bytes")

tables = tables_for(SUPERTUBOS)
src = MemoryRowSource(pk)
ops, sizes3, sizes2 = [], [], []
for i in range(20):
    msg = b"message %d" % i
    t0 = time.perf_counter()
    sig = sign(msg, sk, tables)
    dt = time.perf_counter() - t0
    rep = verify_report(msg, sig, src)
    assert rep.valid
    ops.append(rep.row_ops)
    sizes3.append(payload_size(encode_signature(sig, SUPERTUBOS, CODEC_3TMR)))
    sizes2.append(payload_size(encode_signature(sig, SUPERTUBOS, CODEC_2TMR)))
print(f"last sign {dt:.2f}s")

# verification adds about 0.56k rows of M
print("row ops / k:", np.mean(ops) / SUPERTUBOS.k)
print("payload bytes, triples:", np.mean(sizes3), "pairs:", np.mean(sizes2))
