"""Command-line front end; a thin client of the HTTP service.

Commands run against an in-process instance of the service by default, so
no server needs to be running; ``--server URL`` points them at a remote
one instead.  ``serve`` starts the service with uvicorn.

Scenario parameters come from ``--config`` (flat ``key = value`` file,
missing keys default); command-line flags override config-file keys.
Exit codes: 0 success, 2 invalid config or arguments, 3 solver sentinel
(infinite delay).
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import sys
from typing import Optional

import httpx

from .errors import ConfigError, InvalidParameterError
from .model import ScenarioConfig, load_config

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_SENTINEL = 3


def _config_payload(path: Optional[str]) -> dict:
    config = load_config(path) if path else ScenarioConfig()
    payload = dataclasses.asdict(config)
    payload["data_bits_per_bd"] = list(config.data_bits_per_bd)
    return payload


def _request(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    async def go() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=None) as client:
                return await client.post(path, json=payload)
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://bacnoma.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    response = _request(server, path, payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise ConfigError(f"service rejected the request ({response.status_code}): {detail}")
    return response


def _cmd_single(args) -> int:
    payload = {"config": _config_payload(args.config), "seed": args.seed}
    doc = _post(args.server, "/api/single", payload).json()
    print(json.dumps(doc, indent=2))
    return _EXIT_SENTINEL if doc["sentinel"] else _EXIT_OK


def _cmd_sweep(args) -> int:
    payload = {
        "config": _config_payload(args.config),
        "from_bits": args.from_bits,
        "to_bits": args.to_bits,
        "steps": args.steps,
        "realizations": args.realizations,
        "master_seed": args.seed,
    }
    sys.stdout.write(_post(args.server, "/api/sweep", payload).text)
    return _EXIT_OK


def _cmd_convergence(args) -> int:
    payload = {
        "config": _config_payload(args.config),
        "seed": args.seed,
        "alpha": args.alpha,
    }
    sys.stdout.write(_post(args.server, "/api/convergence", payload).text)
    return _EXIT_OK


def _cmd_dump_instance(args) -> int:
    payload = {
        "config": _config_payload(args.config),
        "seed": args.seed,
        "iteration": args.iteration,
    }
    doc = _post(args.server, "/api/dump-instance", payload).json()
    text = json.dumps(doc, indent=2)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return _EXIT_OK


def _cmd_solve_instance(args) -> int:
    try:
        with open(args.instance, "r", encoding="utf-8") as fh:
            instance = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read instance file {args.instance}: {exc}") from exc
    doc = _post(args.server, "/api/solve-instance", {"instance": instance}).json()
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return _EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario config file (key = value lines)")
    common.add_argument("--seed", type=int, default=0,
                        help="realization seed (master seed for sweeps)")
    common.add_argument("--server", help="remote service URL (default: in-process)")

    parser = argparse.ArgumentParser(
        prog="bacnoma",
        description="Offloading-delay optimization for hybrid backscatter-NOMA uplinks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", parents=[common],
                       help="solve one realization, print the solution JSON")
    p.set_defaults(handler=_cmd_single)

    p = sub.add_parser("sweep", parents=[common],
                       help="payload sweep over paired realizations, print CSV")
    p.add_argument("--from", dest="from_bits", type=float, default=2e5,
                   help="per-device payload at the first grid point (bits)")
    p.add_argument("--to", dest="to_bits", type=float, default=3e6,
                   help="per-device payload at the last grid point (bits)")
    p.add_argument("--steps", type=int, default=5, help="number of grid points")
    p.add_argument("--realizations", type=int, default=100,
                   help="Monte Carlo realizations per grid point")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("convergence", parents=[common],
                       help="per-iteration solver trace of one realization, print CSV")
    p.add_argument("--alpha", type=float, default=None,
                   help="override the residual self-interference fraction")
    p.set_defaults(handler=_cmd_convergence)

    p = sub.add_parser("dump-instance", parents=[common],
                       help="write one subproblem instance as a JSON file")
    p.add_argument("--iteration", type=int, default=0,
                   help="outer iteration to dump (0 = pre-loop state)")
    p.add_argument("--out", required=True, help="output path for the instance JSON")
    p.set_defaults(handler=_cmd_dump_instance)

    p = sub.add_parser("solve-instance", parents=[common],
                       help="solve a dumped instance JSON, print/write the result")
    p.add_argument("--instance", required=True, help="instance JSON path")
    p.add_argument("--out", help="optional output path (default: stdout)")
    p.set_defaults(handler=_cmd_solve_instance)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
