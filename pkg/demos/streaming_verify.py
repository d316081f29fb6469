"""
Verify without loading the public key
=====================================

Rows of M are read from the key file as they are needed.  Requests go
strictly forward through the file.
"""
import os
import tempfile

from wavelet import keygen, sign
from wavelet.keygen import serialize_pk
from wavelet.params import TOY60, tables_for
from wavelet.verifier import FileRowSource, verify_report

sk, pk = keygen(b"\x07\x07", TOY60)
sig = sign(b"streamed", sk, tables_for(TOY60))

path = os.path.join(tempfile.mkdtemp(), "pk.bin")
with open(path, "wb") as fh:
    fh.write(serialize_pk(pk))

with FileRowSource(path) as rows:
    rows.track = True
    rep = verify_report(b"streamed", sig, rows)
    print("valid:", rep.valid)
    print("rows read:", rows.requested)
