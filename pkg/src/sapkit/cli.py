"""Command-line front end: `sap keygen|send|scan|bench|selftest`.

Exit codes: 0 success, 1 protocol/IO error, 2 usage error.  Setting
SAP_TEST_SEED seeds a deterministic RNG; this is meant for test harnesses
only, never for real keys.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import secrets as _secrets
import sys

from . import bench, dksap, engine, registry, selftest
from .curve import CurvePoint, CurveScalar
from .engine import SchemeId
from .errors import SapError

SCHEME_CHOICES = [scheme.value for scheme in SchemeId]


def _make_rng() -> random.Random:
    seed = os.environ.get("SAP_TEST_SEED")
    if seed is not None:
        return random.Random(seed)
    return _secrets.SystemRandom()


def _write_json(path: str, doc: dict, *, force: bool, secret: bool = False) -> None:
    if os.path.exists(path) and not force:
        raise SapError(f"{path} exists; pass --force to overwrite")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")
    if secret:
        os.chmod(path, 0o600)


def _read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


# ---------------------------------------------------------------------------
# keygen


def _cmd_keygen(args) -> int:
    rng = _make_rng()
    scheme = SchemeId(args.scheme)
    bundle_path = args.out + ".bundle.json"
    secret_path = args.out + ".secret.json"
    if scheme is SchemeId.DKSAP_PLAIN:
        keys = dksap.receiver_keygen(rng)
        bundle_doc = {
            "v": 1,
            "scheme": scheme.value,
            "scan_pk": keys.scan.pk.hex(),
            "spend_pk": keys.spend.pk.hex(),
        }
        secret_doc = {
            "v": 1,
            "scheme": scheme.value,
            "scan_sk": keys.scan.sk.hex(),
            "spend_sk": keys.spend.sk.hex(),
        }
    else:
        bundle, receiver_secrets = engine.receiver_setup(
            scheme, rng, paillier_bits=args.paillier_bits, bfv_profile=args.bfv_profile
        )
        bundle_doc = bundle.to_json()
        secret_doc = {
            "v": 1,
            "scheme": scheme.value,
            "spend_sk": receiver_secrets.spend_priv.hex(),
            "he_secret": _he_secret_to_json(scheme, receiver_secrets.he_secret),
            "bundle": bundle_doc,  # self-contained wallet: scanning needs the public half
        }
    _write_json(bundle_path, bundle_doc, force=args.force)
    _write_json(secret_path, secret_doc, force=args.force, secret=True)
    print(f"wrote {bundle_path} and {secret_path}")
    return 0


def _he_secret_to_json(scheme: SchemeId, he_secret) -> dict:
    if scheme is SchemeId.HE_PAILLIER:
        return {"lambda": f"{he_secret.lam:x}", "mu": f"{he_secret.mu:x}"}
    import base64

    from . import bfv

    return {
        "profile": "desk-128bit",
        "blob": base64.b64encode(bfv.secretkey_to_bytes(he_secret)).decode(),
    }


def _he_secret_from_json(scheme: SchemeId, doc: dict):
    if scheme is SchemeId.HE_PAILLIER:
        from .paillier import PaillierSecretKey

        return PaillierSecretKey(int(doc["lambda"], 16), int(doc["mu"], 16))
    import base64

    from . import bfv

    params = bfv.setup(doc["profile"])
    return bfv.secretkey_from_bytes(params, base64.b64decode(doc["blob"]))


# ---------------------------------------------------------------------------
# send


def _cmd_send(args) -> int:
    rng = _make_rng()
    bundle_doc = _read_json(args.bundle)
    scheme = SchemeId.from_wire(bundle_doc.get("scheme", ""))
    with registry.Registry.open(args.registry) as reg:
        if scheme is SchemeId.DKSAP_PLAIN:
            scan_pk = CurvePoint.from_hex(bundle_doc["scan_pk"])
            spend_pk = CurvePoint.from_hex(bundle_doc["spend_pk"])
            announcement, _ = dksap.sender_derive(rng, scan_pk, spend_pk)
            index = reg.append(announcement.to_json())
            stealth = announcement.stealth
        else:
            bundle = engine.MetaAddressBundle.from_json(bundle_doc)
            announcement, view = engine.sender_send(
                bundle, rng, include_address=not args.no_address
            )
            index = reg.append(announcement.to_json())
            stealth = view.stealth
    print(f"stealth address: {stealth}")
    print(f"registry index:  {index}")
    return 0


# ---------------------------------------------------------------------------
# scan


def _cmd_scan(args) -> int:
    secret_doc = _read_json(args.secrets)
    scheme = SchemeId.from_wire(secret_doc.get("scheme", ""))
    with registry.Registry.open(args.registry) as reg:
        stop = len(reg) if args.to is None else args.to
        docs = reg.read_range(args.start, stop)
    offset = args.start
    rows: list[tuple[int, str, str]] = []
    if scheme is SchemeId.DKSAP_PLAIN:
        keys = dksap.DkReceiverKeys(
            scan=_wallet_from_sk(secret_doc["scan_sk"]),
            spend=_wallet_from_sk(secret_doc["spend_sk"]),
        )
        parsed: list[tuple[int, dksap.DkAnnouncement]] = []
        for i, doc in enumerate(docs):
            if doc.get("scheme") != "dksap":
                continue
            try:
                parsed.append((offset + i, dksap.DkAnnouncement.from_json(doc)))
            except (ValueError, SapError):
                continue
        result = dksap.scan([ann for _, ann in parsed], keys)
        for match in result.matches:
            reg_index, ann = parsed[match.index]
            rows.append((reg_index, str(ann.stealth), match.one_time_sk.hex()))
    else:
        bundle = engine.MetaAddressBundle.from_json(secret_doc["bundle"])
        receiver_secrets = engine.ReceiverSecrets(
            scheme=scheme,
            spend_priv=CurveScalar.from_hex(secret_doc["spend_sk"]),
            he_secret=_he_secret_from_json(scheme, secret_doc["he_secret"]),
        )
        for i, doc in enumerate(docs):
            summary = engine.receiver_scan([doc], receiver_secrets, bundle)
            for wallet in summary.wallets:
                rows.append((offset + i, str(wallet.stealth), wallet.secret_key.hex()))
    if not rows:
        print("no matching announcements")
        return 0
    print(f"{'index':>6}  {'stealth address':<42}  one-time key")
    for index, address, key_hex in rows:
        shown = key_hex if args.show_keys else "(hidden; use --show-keys)"
        print(f"{index:>6}  {address:<42}  {shown}")
    return 0


def _wallet_from_sk(sk_hex: str):
    from . import curve

    sk = CurveScalar.from_hex(sk_hex)
    return curve.WalletKeyPair(sk, curve.scalar_mul(sk, curve.GENERATOR))


# ---------------------------------------------------------------------------
# bench


def _cmd_bench(args) -> int:
    rng = _make_rng()
    schemes = [SchemeId(name) for name in args.schemes]
    if args.iterations < bench.MIN_ITERATIONS:
        print(f"error: --iterations must be at least {bench.MIN_ITERATIONS}", file=sys.stderr)
        return 2
    reports = bench.run_bench(schemes, args.iterations, rng, with_keygen=args.with_keygen)
    print(bench.format_timing_table(reports))
    print()
    print(bench.format_storage_table(reports))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(bench.to_csv(reports))
        print(f"\nwrote {args.csv}")
    return 0


def _cmd_selftest(args) -> int:
    return 0 if selftest.run_selftest(_make_rng()) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sap",
        description="Stealth-address toolkit: key generation, sending, scanning, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_keygen = sub.add_parser("keygen", help="create receiver keys and a public bundle")
    p_keygen.add_argument("--scheme", required=True, choices=SCHEME_CHOICES)
    p_keygen.add_argument("--out", required=True, help="output path prefix")
    p_keygen.add_argument("--force", action="store_true", help="overwrite existing files")
    p_keygen.add_argument("--paillier-bits", type=int, default=2048)
    p_keygen.add_argument("--bfv-profile", default="desk-128bit")
    p_keygen.set_defaults(func=_cmd_keygen)

    p_send = sub.add_parser("send", help="derive a stealth payment and append it to the registry")
    p_send.add_argument("--bundle", required=True, help="receiver bundle JSON path")
    p_send.add_argument("--registry", required=True, help="registry directory")
    p_send.add_argument("--no-address", action="store_true",
                        help="strict mode: omit the stealth address from the announcement")
    p_send.set_defaults(func=_cmd_send)

    p_scan = sub.add_parser("scan", help="recover own announcements from the registry")
    p_scan.add_argument("--secrets", required=True, help="receiver secret JSON path")
    p_scan.add_argument("--registry", required=True, help="registry directory")
    p_scan.add_argument("--from", dest="start", type=int, default=0)
    p_scan.add_argument("--to", dest="to", type=int, default=None)
    p_scan.add_argument("--show-keys", action="store_true")
    p_scan.set_defaults(func=_cmd_scan)

    p_bench = sub.add_parser("bench", help="timing and storage report")
    p_bench.add_argument("--schemes", nargs="+", choices=SCHEME_CHOICES,
                         default=SCHEME_CHOICES)
    p_bench.add_argument("--iterations", type=int, default=100)
    p_bench.add_argument("--csv", help="also write CSV to this path")
    p_bench.add_argument("--with-keygen", action="store_true",
                         help="include receiver key generation in the timed cycle")
    p_bench.set_defaults(func=_cmd_bench)

    p_self = sub.add_parser("selftest", help="run the built-in correctness checks")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
