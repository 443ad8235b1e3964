#!/usr/bin/env python3
"""Computes reference values with independent libraries and freezes them into
tests/golden/oracles.json. The C++ tests compare against this file; rerun only
when a wire format deliberately changes.

Libraries: hashlib (SHA-256), cryptography (Ed25519), cbor2 (CBOR),
scikit-learn (TF-IDF, ROC). Nothing here imports the C++ code.
"""

import base64
import hashlib
import json
import math
import random
import sys
from collections import Counter
from pathlib import Path

import cbor2
import numpy as np
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics import roc_curve

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden" / "oracles.json"


def sha(b: bytes) -> bytes:
    return hashlib.sha256(b).digest()


def keypair(seed_hex: str):
    sk = Ed25519PrivateKey.from_private_bytes(bytes.fromhex(seed_hex))
    pk = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return sk, pk


def canonical(obj) -> bytes:
    return cbor2.dumps(obj, canonical=True)


# ---- hashes and signatures ---------------------------------------------------

def hash_vectors():
    return [
        {"input_hex": "", "sha256": hashlib.sha256(b"").hexdigest()},
        {"input_hex": b"abc".hex(), "sha256": hashlib.sha256(b"abc").hexdigest()},
        {"input_text_repeat": ["a", 1000000], "sha256": hashlib.sha256(b"a" * 1000000).hexdigest()},
    ]


def ed25519_vectors():
    out = []
    # RFC 8032 section 7.1, test 1 (empty message) and test 2 (one byte).
    for seed, msg in [
        ("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60", b""),
        ("4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb", bytes([0x72])),
        ("0101010101010101010101010101010101010101010101010101010101010101", b"govkit ed25519 vector"),
    ]:
        sk, pk = keypair(seed)
        out.append({"seed": seed, "public_key": pk.hex(), "message_hex": msg.hex(), "signature": sk.sign(msg).hex()})
    return out


# ---- manifest ------------------------------------------------------------------

MANIFEST = {
    "entries": [
        {"sid": "web_search", "ver": "1.0", "h": sha(b"web_search implementation v1").hex(), "scopes": ["net:read", "net:read", "cache:write"]},
        {"sid": "fetch_page", "ver": "2.1", "api_schema": "(url: string) -> html", "scopes": ["net:read"]},
        {"sid": "web_search", "ver": "0.9", "h": sha(b"web_search implementation v0.9").hex(), "scopes": []},
    ]
}


def manifest_oracle():
    entries = []
    for e in MANIFEST["entries"]:
        if "h" in e:
            h = bytes.fromhex(e["h"])
        else:
            h = sha(f"{e['sid']}|{e['ver']}|{e['api_schema']}".encode())
        entries.append([e["sid"], e["ver"], h, sorted(set(e["scopes"]))])
    entries.sort(key=lambda x: (x[0], x[1]))
    enc = cbor2.dumps(entries)
    return {"manifest": MANIFEST, "canonical_hex": enc.hex(), "manifest_hash": sha(enc).hex(),
            "descriptor_hash": sha(b"fetch_page|2.1|(url: string) -> html").hex(),
            "empty_manifest_hash": sha(cbor2.dumps([])).hex()}


# ---- certificate -----------------------------------------------------------------

ROOT_SEED = "a0" * 32
AGENT_SEED = "b1" * 32


def cert_fields(id_, parent, pk, model, mhash, tier, depth, models, rate, level, config, gov, node, nb, na):
    return [id_, parent, pk, list(model), mhash, [tier, depth, sorted(models), list(rate)],
            [level, config], gov, node, nb, na]


def sign_cert(fields, sk):
    body = canonical(fields)
    sig = sk.sign(b"govkit/cert/v1" + body)
    full = canonical(fields + [sig])
    return body, sig, full


def pem(der: bytes) -> str:
    b64 = base64.b64encode(der).decode()
    lines = [b64[i:i + 64] for i in range(0, len(b64), 64)]
    return "-----BEGIN AGENT CERT-----\n" + "\n".join(lines) + "\n-----END AGENT CERT-----\n"


def cert_oracle():
    root_sk, root_pk = keypair(ROOT_SEED)
    agent_sk, agent_pk = keypair(AGENT_SEED)
    empty_hash = sha(cbor2.dumps([]))
    root = cert_fields("root-ca", "root-ca", root_pk, ("", "", ""), empty_hash, 0, 3,
                       ["analyst-m", "searcher-m"], (1000, 1), 0, {}, 3, 0, 1700000000000, 1900000000000)
    r_body, r_sig, r_full = sign_cert(root, root_sk)
    mhash = bytes.fromhex(manifest_oracle()["manifest_hash"])
    agent = cert_fields("research-1", "root-ca", agent_pk, ("mockai", "searcher-m", "2025-01"), mhash, 2, 1,
                        ["searcher-m"], (5, 2), 1, {"theta": "0.85", "temperature": "0", "seed_policy": "recorded"},
                        2, 1, 1750000000000, 1800000000000)
    a_body, a_sig, a_full = sign_cert(agent, root_sk)
    return {
        "root_seed": ROOT_SEED, "agent_seed": AGENT_SEED,
        "root": {"body_hex": r_body.hex(), "signature": r_sig.hex(), "encoded_hex": r_full.hex(),
                 "certificate_hash": sha(r_full).hex(), "pem": pem(r_full)},
        "agent": {"body_hex": a_body.hex(), "signature": a_sig.hex(), "encoded_hex": a_full.hex(),
                  "certificate_hash": sha(a_full).hex(), "pem": pem(a_full)},
    }


# ---- ledger record -----------------------------------------------------------------

def record_oracle():
    s_sk, s_pk = keypair("c2" * 32)
    r_sk, r_pk = keypair("d3" * 32)
    records = []
    prev = bytes(32)
    for seq in (1, 2):
        fields = [seq, 1767225600000 + seq, "coordinator", "research-1",
                  sha(b"cert/coordinator"), sha(b"cert/research-1"),
                  sha(f"input {seq}".encode()), sha(f"output {seq}".encode()),
                  [42 + seq, "2025-01", sha(b"skills")], prev, [0] if seq == 2 else []]
        body = canonical(fields)
        msg = b"govkit/ledger/v1" + body
        ss, rs = s_sk.sign(msg), r_sk.sign(msg)
        full = canonical(fields + [ss, rs])
        records.append({"body_hex": body.hex(), "sender_sig": ss.hex(), "receiver_sig": rs.hex(),
                        "encoded_hex": full.hex(), "record_hash": sha(full).hex()})
        prev = sha(full)
    storage = b"".join(len(bytes.fromhex(r["encoded_hex"])).to_bytes(4, "little") + bytes.fromhex(r["encoded_hex"])
                       for r in records)
    return {"sender_seed": "c2" * 32, "receiver_seed": "d3" * 32, "records": records, "storage_hex": storage.hex()}


# ---- budget --------------------------------------------------------------------------

def budget_oracle():
    eps = [{"n": n, "alpha": a, "epsilon": 1 - a ** (1 / n)}
           for n in (1, 10, 25, 50, 100, 200, 500, 1000) for a in (0.01, 0.05)]
    req = []
    for e, a in [(0.089, 0.01), (0.05, 0.05), (0.01, 0.01), (0.3, 0.01), (0.001, 0.05)]:
        n = 1
        while 1 - a ** (1 / n) > e:  # brute force
            n += 1
        req.append({"epsilon": e, "alpha": a, "n": n, "approximate_n": math.ceil(math.log(1 / a) / e)})
    return {"epsilon_bound": eps, "required_budget": req}


# ---- metrics -------------------------------------------------------------------------------

PAIRS = [
    ("the quick brown fox", "the quick brown fox"),
    ("the quick brown fox", "the quick brown cat"),
    ("alpha beta gamma delta", "delta gamma beta alpha"),
    ("short", "a much longer sentence with several words"),
    ("repeat repeat repeat words", "repeat words words"),
    ("ab", "abc"),
    ("", "nonempty"),
    ("naïve café résumé", "naive cafe resume"),
    ("x y z", "a b c"),
    ("one two three four five six", "one two three four five seven"),
]


def char_match(a, b):
    if not a and not b:
        return 1.0
    return sum(1 for x, y in zip(a, b) if x == y) / max(len(a), len(b))


def jaccard(a, b):
    sa, sb = set(a.split()), set(b.split())
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def tfidf(a, b):
    ta, tb = a.split(), b.split()
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    if a == b:
        return 1.0
    v = TfidfVectorizer(tokenizer=str.split, lowercase=False, token_pattern=None, smooth_idf=True, norm="l2")
    m = v.fit_transform([a, b]).toarray()
    return float(min(1.0, max(0.0, np.dot(m[0], m[1]))))


def grams(s, n=3):
    if not s:
        return Counter()
    if len(s) < n:
        return Counter([s])
    return Counter(s[i:i + n] for i in range(len(s) - n + 1))


def ngram(a, b):
    if a == b:
        return 1.0
    ga, gb = grams(a), grams(b)
    if not ga or not gb:
        return 0.0
    dot = sum(ga[k] * gb[k] for k in ga)
    na = math.sqrt(sum(v * v for v in ga.values()))
    nb = math.sqrt(sum(v * v for v in gb.values()))
    return min(1.0, max(0.0, dot / (na * nb)))


def metric_oracle():
    return [{"a": a, "b": b, "char_match": char_match(a, b), "jaccard": jaccard(a, b), "tfidf_cosine": tfidf(a, b),
             "ngram_cosine": ngram(a, b)} for a, b in PAIRS]


# ---- calibration ------------------------------------------------------------------------------

def calibration_oracle():
    rng = random.Random(7)
    scores = [round(rng.uniform(0.3, 0.9), 4) for _ in range(60)]
    labels = [rng.random() < 0.5 + (s - 0.6) for s in scores]
    fpr, tpr, _ = roc_curve([int(l) for l in labels], scores)
    best_j = float(max(tpr - fpr))
    return {"scores": scores, "labels": labels, "youden_j": best_j}


def main():
    oracles = {
        "hash": hash_vectors(),
        "ed25519": ed25519_vectors(),
        "manifest": manifest_oracle(),
        "certificate": cert_oracle(),
        "ledger": record_oracle(),
        "budget": budget_oracle(),
        "metrics": metric_oracle(),
        "calibration": calibration_oracle(),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(oracles, indent=1, ensure_ascii=False) + "\n")
    print(f"wrote {OUT}", file=sys.stderr)


if __name__ == "__main__":
    main()
