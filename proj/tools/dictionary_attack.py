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
"""Dictionary attacker against license-field commitments.

Reads a JSON file {"field_name": ..., "commitments": [hex, ...]} and a
license-id list, hashes every license string and reports which commitments
it can match.

Without --salt the attacker knows no salt and tries every unsalted encoding
it can think of. With --salt HEX --target I it knows the salt of commitment
I and tries Commit(salt, lp(name) || lp(value)) for every license.

Prints {"candidates_tried": N, "matches": [{"commitment": i, "license": id}]}.
"""

import argparse
import hashlib
import json
import struct
import sys


def lp(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def sha256(b: bytes) -> bytes:
    return hashlib.sha256(b).digest()


def commit(salt: bytes, data: bytes) -> bytes:
    return sha256(lp(salt) + lp(data))


def unsalted_candidates(name: bytes, value: bytes):
    payload = lp(name) + lp(value)
    yield sha256(value)
    yield sha256(name + value)
    yield sha256(name + b"=" + value)
    yield sha256(payload)
    yield sha256(lp(payload))
    yield commit(b"", payload)
    yield commit(b"\x00" * 32, payload)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--licenses", required=True)
    parser.add_argument("--commitments", required=True)
    parser.add_argument("--salt")
    parser.add_argument("--target", type=int)
    args = parser.parse_args()

    with open(args.licenses) as f:
        licenses = json.load(f)["ids"]
    with open(args.commitments) as f:
        doc = json.load(f)
    name = doc["field_name"].encode()
    commitments = [bytes.fromhex(c) for c in doc["commitments"]]
    index = {c: i for i, c in enumerate(commitments)}

    tried = 0
    matches = []
    if args.salt is None:
        for lic in licenses:
            for digest in unsalted_candidates(name, lic.encode()):
                tried += 1
                if digest in index:
                    matches.append({"commitment": index[digest], "license": lic})
    else:
        salt = bytes.fromhex(args.salt)
        target = commitments[args.target]
        for lic in licenses:
            tried += 1
            if commit(salt, lp(name) + lp(lic.encode())) == target:
                matches.append({"commitment": args.target, "license": lic})

    json.dump({"candidates_tried": tried, "matches": matches}, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
