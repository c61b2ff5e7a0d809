#!/usr/bin/env python3
# Copyright 2026 The Petra Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent oracle for the Merkle golden vectors.

Builds a 3-node tree (sbom -> complex "package" -> field version=1.0, the
field redacted) from fixed salts, key and nonce, plus the all-public
variant of the same tree and a bare commitment, and hashes it with hashlib
and the cryptography package only.

  merkle_golden.py --write FILE   regenerate the vector file
  merkle_golden.py --check FILE   exit 1 unless FILE matches
"""

import argparse
import hashlib
import json
import struct
import sys

from cryptography.hazmat.primitives.ciphers.aead import AESGCM


def lp(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def h(b: bytes) -> bytes:
    return hashlib.sha256(b).digest()


def commit(salt: bytes, data: bytes) -> bytes:
    return h(lp(salt) + lp(data))


def vectors() -> dict:
    salt_s = bytes(range(32))
    salt_c = b"\x11" * 32
    salt_f = b"\x22" * 32
    aes_key = b"\x33" * 32
    nonce = b"\x44" * 12
    index, meta = b"pkg:generic/golden@1.0", b"Native"
    element_type = b"package"
    name, value = b"version", b"1.0"
    attribute = b"role:auditor"

    # Access tree "role:auditor": leaf tag 0x01 || lp(attribute).
    access = b"\x01" + lp(attribute)
    policy_id = h(access)
    # Keyslot bytes only need to carry the access tree; the rest is opaque to
    # the hash: scheme || lp(version || lp(A_n) || body) || confirm.
    scheme_ct = b"\x01" + lp(access) + b"\x00" * 16
    slot = b"\x7f" + lp(scheme_ct) + b"\xcc" * 16

    payload_f = lp(name) + lp(value)
    payload_c = lp(element_type)
    payload_s = lp(index) + lp(meta)

    h_f_plain = commit(salt_f, payload_f)
    h_c_plain = h(lp(commit(salt_c, payload_c)) + lp(h_f_plain))
    h_s_plain = h(lp(commit(salt_s, payload_s)) + lp(h_c_plain))

    sealed = AESGCM(aes_key).encrypt(nonce, lp(salt_f) + lp(payload_f),
                                     policy_id)
    node_ct = policy_id + nonce + sealed

    h_f = h(b"\x52" + lp(access) + lp(node_ct) + lp(h_f_plain))
    h_c = h(b"\x50" + lp(lp(salt_c) + lp(payload_c)) + lp(h_c_plain) +
            lp(h_f))
    table = struct.pack(">I", 1) + policy_id + lp(slot)
    meta_head = b"\x50" + lp(lp(salt_s) + lp(payload_s))
    root = h(lp(lp(table) + lp(meta_head)) + lp(h_s_plain) + lp(h_c))

    # Same tree with every node public and an empty keyslot table.
    h_f_pub = h(b"\x50" + lp(lp(salt_f) + lp(payload_f)) + lp(h_f_plain))
    h_c_pub = h(b"\x50" + lp(lp(salt_c) + lp(payload_c)) + lp(h_c_plain) +
                lp(h_f_pub))
    empty_table = struct.pack(">I", 0)
    public_root = h(lp(lp(empty_table) + lp(meta_head)) + lp(h_s_plain) +
                    lp(h_c_pub))

    hexs = lambda b: b.hex()
    return {
        "inputs": {
            "index": index.decode(),
            "doc_meta": meta.decode(),
            "element_type": element_type.decode(),
            "field_name": name.decode(),
            "field_value": value.decode(),
            "access": attribute.decode(),
            "salt_sbom": hexs(salt_s),
            "salt_complex": hexs(salt_c),
            "salt_field": hexs(salt_f),
            "aes_key": hexs(aes_key),
            "nonce": hexs(nonce),
            "keyslot": hexs(slot),
        },
        "intermediate": {
            "access_encoding": hexs(access),
            "policy_id": hexs(policy_id),
            "node_ciphertext": hexs(node_ct),
        },
        "outputs": {
            "h_F_plain": hexs(h_f_plain),
            "h_C_plain": hexs(h_c_plain),
            "h_S_plain": hexs(h_s_plain),
            "h_F": hexs(h_f),
            "h_C": hexs(h_c),
            "merkle_root": hexs(root),
            "all_public_merkle_root": hexs(public_root),
            "commit_zero_salt_a": hexs(commit(b"\x00" * 32, b"a")),
        },
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--write", metavar="FILE")
    group.add_argument("--check", metavar="FILE")
    args = parser.parse_args()
    expected = vectors()
    if args.write:
        with open(args.write, "w") as f:
            json.dump(expected, f, indent=2)
            f.write("\n")
        return 0
    with open(args.check) as f:
        actual = json.load(f)
    if actual != expected:
        print("golden vectors differ from the oracle", file=sys.stderr)
        return 1
    print("golden vectors match the oracle")
    return 0


if __name__ == "__main__":
    sys.exit(main())
