"""Command-line client for the fuzzbin service.

Every subcommand builds a request, sends it to the service, and turns the
response into local files or stdout lines. By default the client mounts
the service in-process over an ASGI transport, so no server needs to be
running; ``--server URL`` points the same commands at a remote instance.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import sys
from pathlib import Path

import httpx
import numpy as np
import pydantic

from . import __version__
from .core import LabeledDataset, ROLE_ENROLLED, ROLE_PROBE, format_float, load_csv, save_csv
from .errors import DataError, FuzzbinError, NumericError, UsageError
from .evalbench import emit_report
from .modelfile import load_model, save_model
from .service import schemas

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_IMAGE_SUFFIXES = (".pgm", ".pbm")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _client(server: str | None) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server, timeout=300.0)
    from .service import create_app

    transport = httpx.ASGITransport(app=create_app())
    return httpx.AsyncClient(transport=transport, base_url="http://fuzzbin.local", timeout=300.0)


def _raise_for_response(resp: httpx.Response) -> None:
    if resp.status_code < 400:
        return
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        code = detail.get("code", "error")
        message = detail.get("message", resp.text)
    else:
        # pydantic validation errors arrive as a list of field problems
        code = "usage"
        message = str(detail) if detail is not None else resp.text
    if code == "usage":
        raise UsageError(message)
    if code == "data":
        raise DataError(message)
    if code == "numeric":
        raise NumericError(message)
    raise FuzzbinError(message)


async def _post(client: httpx.AsyncClient, path: str, payload) -> dict:
    resp = await client.post(path, json=payload)
    _raise_for_response(resp)
    return resp.json()


# ---------------------------------------------------------------- gen ------

async def _cmd_gen(args) -> int:
    req = schemas.SyntheticRequest(
        identities=args.identities,
        enrolled_per_id=args.enrolled,
        probes_per_id=args.probes,
        dim=args.dim,
        identity_spread=args.identity_spread,
        within_spread=args.within_spread,
        seed=args.seed,
    )
    async with _client(args.server) as client:
        body = await _post(client, "/datasets/synthetic", req.model_dump())
    data = schemas.DatasetPayload(**body).to_dataset()
    save_csv(data, args.out)
    enrolled = int(sum(r == ROLE_ENROLLED for r in data.roles))
    print(f"wrote {args.out}: {data.size} rows ({enrolled} enrolled, {data.size - enrolled} probe)")
    return EXIT_OK


# ------------------------------------------------------------ extract ------

def _collect_images(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(
                child for child in sorted(p.iterdir())
                if child.suffix.lower() in _IMAGE_SUFFIXES
            )
        elif p.exists():
            paths.append(p)
        else:
            raise UsageError(f"no such input: {item}")
    if not paths:
        raise UsageError("no inputs: supply PGM/PBM files or a directory containing them")
    return paths


def _identity_and_index(stem: str) -> tuple[str, str]:
    if "_" in stem:
        ident, idx = stem.rsplit("_", 1)
        return ident, idx
    return stem, ""


def _assign_roles(paths: list[Path], enroll_first: int | None) -> list[str]:
    if enroll_first is None:
        return [ROLE_ENROLLED] * len(paths)
    order: dict[str, int] = {}
    roles = []
    for p in paths:
        ident, _ = _identity_and_index(p.stem)
        seen = order.get(ident, 0)
        roles.append(ROLE_ENROLLED if seen < enroll_first else ROLE_PROBE)
        order[ident] = seen + 1
    return roles


async def _cmd_extract(args) -> int:
    if args.enroll_first is not None and args.enroll_first < 1:
        raise UsageError("--enroll-first must be >= 1")
    paths = _collect_images(args.inputs)
    roles = _assign_roles(paths, args.enroll_first)
    rows = []
    identities = []
    failures = 0
    async with _client(args.server) as client:
        for p in paths:
            req = schemas.ExtractRequest(
                filename=str(p),
                data_base64=base64.b64encode(p.read_bytes()).decode("ascii"),
                hpr_fraction=args.hpr_fraction,
            )
            try:
                body = await _post(client, "/features/extract", req.model_dump())
            except (DataError, UsageError) as exc:
                print(f"{p}: {exc}", file=sys.stderr)
                failures += 1
                continue
            for w in body["warnings"]:
                print(f"{p}: warning: zero denominator in {w}", file=sys.stderr)
            rows.append(body["features"])
            identities.append(_identity_and_index(p.stem)[0])
    if failures:
        raise DataError(f"{failures} of {len(paths)} images failed to decode")
    data = LabeledDataset(
        vectors=np.array(rows, dtype=np.float64),
        identities=tuple(identities),
        roles=tuple(roles),
    )
    save_csv(data, args.out)
    print(f"wrote {args.out}: {data.size} rows from {len(paths)} images")
    return EXIT_OK


# -------------------------------------------------------------- train ------

async def _cmd_train(args) -> int:
    dataset = load_csv(args.features)
    req = schemas.TrainRequest(
        dataset=schemas.DatasetPayload.from_dataset(dataset),
        algorithm="kmeans" if args.kmeans else "fcm",
        clusters=args.clusters,
        fuzzifier=args.fuzzifier,
        epsilon=args.epsilon,
        max_iterations=args.max_iterations,
        seed=args.seed,
        normalize=args.normalize,
    )
    async with _client(args.server) as client:
        body = await _post(client, "/train", req.model_dump())
    resp = schemas.TrainResponse(**body)
    model, assignments = resp.model.to_model()
    save_model(args.out, model, assignments)
    print(f"iterations_run={resp.iterations_run}")
    print(f"final_objective={format_float(resp.final_objective)}")
    print(f"model={args.out}")
    return EXIT_OK


# ----------------------------------------------------------- identify ------

def _parse_query(spec: str) -> list[float]:
    p = Path(spec)
    if p.exists():
        text = p.read_text()
        first = text.lstrip().splitlines()[0] if text.strip() else ""
        if first.startswith("identity,role,"):
            data = load_csv(p)
            return [float(v) for v in data.vectors[0]]
        for line in text.splitlines():
            line = line.strip()
            if line:
                try:
                    return [float(tok) for tok in line.replace(",", " ").split()]
                except ValueError:
                    raise DataError(f"{spec}: query line is not numeric: {line[:40]!r}")
        raise DataError(f"{spec}: empty query file")
    try:
        return [float(tok) for tok in spec.replace(",", " ").split()]
    except ValueError:
        raise UsageError(
            f"--query must be a comma-separated vector or an existing file, got {spec!r}"
        )


def _print_identify(resp: schemas.IdentifyResponse, as_kv: bool) -> None:
    memberships = ",".join(format_float(g) for g in resp.query_memberships)
    ranked = ",".join(str(j) for j in resp.ranked_clusters)
    if as_kv:
        print(f"ranked_clusters={ranked}")
        print(f"memberships={memberships}")
        print(f"candidate_count={resp.candidate_count}")
        print(f"best_identity={resp.best_identity if resp.best_identity is not None else ''}")
        print(f"best_distance={format_float(resp.best_distance) if resp.best_distance is not None else ''}")
        if resp.exhaustive_identity is not None:
            print(f"exhaustive_identity={resp.exhaustive_identity}")
            print(f"exhaustive_distance={format_float(resp.exhaustive_distance)}")
            print(f"exhaustive_agrees={'true' if resp.exhaustive_agrees else 'false'}")
        return
    print(f"ranked clusters : {ranked}")
    print(f"memberships     : {memberships}")
    print(f"candidates seen : {resp.candidate_count}")
    if resp.best_identity is None:
        print("best match      : none (no templates in the searched clusters)")
    else:
        print(f"best match      : {resp.best_identity} (distance {resp.best_distance:.6g})")
    if resp.exhaustive_identity is not None:
        verdict = "agrees" if resp.exhaustive_agrees else "DISAGREES"
        print(
            f"exhaustive scan : {resp.exhaustive_identity} "
            f"(distance {resp.exhaustive_distance:.6g}) {verdict}"
        )


async def _cmd_identify(args) -> int:
    model, assignments = load_model(args.model)
    dataset = load_csv(args.enrolled)
    query = _parse_query(args.query)
    register = schemas.RegisterRequest(
        model=schemas.ModelPayload.from_model(model, assignments),
        enrolled=schemas.DatasetPayload.from_dataset(dataset),
    )
    ident = schemas.IdentifyRequest(
        query=query, top=args.top, exhaustive_check=args.exhaustive
    )
    async with _client(args.server) as client:
        body = await _post(client, "/models", register.model_dump())
        model_id = body["model_id"]
        result = await _post(client, f"/models/{model_id}/identify", ident.model_dump())
    _print_identify(schemas.IdentifyResponse(**result), args.json)
    return EXIT_OK


# --------------------------------------------------------------- eval ------

def _parse_c_range(spec: str) -> list[int]:
    try:
        if ".." in spec:
            lo_s, hi_s = spec.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(spec)
    except ValueError:
        raise UsageError(f"--c-range must look like 2..9, got {spec!r}")
    if lo < 1 or hi < lo:
        raise UsageError(f"--c-range bounds out of order: {spec!r}")
    return list(range(lo, hi + 1))


async def _cmd_eval(args) -> int:
    dataset = load_csv(args.features)
    if not any(r == ROLE_PROBE for r in dataset.roles):
        raise UsageError(
            "dataset has no probe rows; evaluation needs an enrollment/probe "
            "split (role column values 'enrolled' and 'probe')"
        )
    req = schemas.EvalRequest(
        dataset=schemas.DatasetPayload.from_dataset(dataset),
        c_values=_parse_c_range(args.c_range),
        top=args.top,
        fuzzifier=args.fuzzifier,
        epsilon=args.epsilon,
        max_iterations=args.max_iterations,
        seed=args.seed,
    )
    async with _client(args.server) as client:
        body = await _post(client, "/evaluate", req.model_dump())
    report = schemas.EvalResponse(**body).to_report()
    csv_path, svg_path = emit_report(report, args.out)
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    for row in report.rows:
        if row.failed is not None:
            print(f"c={row.c}: FAILED ({row.failed})", file=sys.stderr)
        else:
            print(
                f"c={row.c}: fcm_binmiss={row.fcm_binmiss} "
                f"kmeans_top1={row.kmeans_top1_binmiss} kmeans_top2={row.kmeans_top2_binmiss} "
                f"fcm_penetration={row.fcm_penetration:.4f}"
            )
    return EXIT_OK


# -------------------------------------------------------------- serve ------

async def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = uvicorn.Config(create_app(), host=args.host, port=args.port, log_level="info")
    await uvicorn.Server(config).serve()
    return EXIT_OK


# ------------------------------------------------------------- parser ------

def build_parser() -> _Parser:
    parser = _Parser(prog="fuzzbin", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fuzzbin {__version__}")
    parser.add_argument(
        "--server", default=None, metavar="URL",
        help="send requests to a running service instead of in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic labeled dataset CSV")
    p.add_argument("--identities", type=int, default=1000)
    p.add_argument("--enrolled", type=int, default=6, help="templates enrolled per identity")
    p.add_argument("--probes", type=int, default=3, help="probe templates per identity")
    p.add_argument("--dim", type=int, default=27)
    p.add_argument("--identity-spread", type=float, default=1.0)
    p.add_argument("--within-spread", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("extract", help="extract signature features from PGM/PBM images")
    p.add_argument("inputs", nargs="+", help="image files or a directory of them")
    p.add_argument("--hpr-fraction", type=float, default=0.75)
    p.add_argument(
        "--enroll-first", type=int, default=None, metavar="K",
        help="per identity, mark the first K images enrolled and the rest probe",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("train", help="train a cluster index on enrolled templates")
    p.add_argument("features", help="dataset CSV")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--fuzzifier", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iterations", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--kmeans", action="store_true", help="train the hard baseline instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("identify", help="identify a query against a trained index")
    p.add_argument("model", help="model file from 'train'")
    p.add_argument("enrolled", help="the dataset CSV the model was trained on")
    p.add_argument("--query", required=True, help="comma-separated vector or a file")
    p.add_argument("--top", type=int, default=2)
    p.add_argument("--json", action="store_true", help="emit line-delimited key=value output")
    p.add_argument("--exhaustive", action="store_true",
                   help="also run the full-database scan and compare")
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("eval", help="sweep cluster counts and report bin-miss rates")
    p.add_argument("features", help="dataset CSV with enrolled and probe rows")
    p.add_argument("--c-range", required=True, help="cluster counts, e.g. 2..9")
    p.add_argument("--top", type=int, default=2)
    p.add_argument("--fuzzifier", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iterations", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for report.csv/report.svg")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return asyncio.run(args.func(args))
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        print(f"fuzzbin: usage error: {where}: {first.get('msg')}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"fuzzbin: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"fuzzbin: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"fuzzbin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FuzzbinError as exc:
        print(f"fuzzbin: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except httpx.HTTPError as exc:
        print(f"fuzzbin: transport error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
