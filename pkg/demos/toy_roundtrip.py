"""
Sign and verify with a toy parameter set
========================================

toy48 is tiny and insecure; it exists so the whole pipeline runs in
milliseconds.
"""
from wavelet import keygen, sign, verify
from wavelet.params import TOY48, tables_for
from wavelet.sigcodec import encode_signature, decode_signature

sk, pk = keygen(b"\x01\x02", TOY48)
print("public key:", pk.M.rows, "x", pk.M.cols)

# toy sets use always-accept rejection tables
tables = tables_for(TOY48)
sig = sign(b"hello", sk, tables)
print("s =", "".join(map(str, sig.s.to_trits())))
print("valid:", verify(b"hello", sig, pk))
print("other message:", verify(b"hellp", sig, pk))

# on the wire: header, salt, compressed s
data = encode_signature(sig, TOY48)
print(len(data), "bytes on the wire")
again, params, codec = decode_signature(data)
print("decoded equal:", again == sig)
