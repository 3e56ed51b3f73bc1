from __future__ import annotations

import argparse
import json
import logging
import logging.config
import math
import os
import sys
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, TextIO

from .config import Settings, load_settings
from .errors import OutOfRangeError, SpinExtError, UsageError
from .group_utils import (
    PermGroupSpec,
    all_subgroups,
    enumerate_group,
    parse_perm_list,
    semidirect_decompositions,
    semidirect_index_check,
)
from .quadform import (
    QuadraticRefinement,
    arf,
    arf_basis_formula,
    evaluate,
    gauss_sum,
    pullback,
    reduce_to_standard,
    zero_count,
)
from .report import OutputEnvelope, list_templates, render, validate_envelope
from .resources import read_text_resource
from .surface_spin import (
    all_orbits,
    count_formula,
    count_recurrence,
    counting_bound_check,
    enumerate_spin,
    index_lower_bound_surface,
    no_extension_witness,
    spin_orbit,
    transitivity_witness,
)
from .symplectic import (
    SymplecticSpace,
    all_transvections,
    chain_transvections,
    formula_order,
    is_symplectic,
    stabilizer_chain,
)
from .torus_spin import (
    TorusSpin,
    gl_order,
    index_lower_bound_torus,
    t3_signature_gate,
    torus_orbit,
    twist_closure,
    twist_matrices,
)
from .version import get_version, supported_config_range_str, supported_output_range_str
from .yamlio import yaml_loader

logger = logging.getLogger(__name__)

_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def setup_logging() -> None:
    """Setup logging from YAML config with environment variable override."""
    try:
        config = yaml_loader.load(read_text_resource("logging.yaml"))
    except FileNotFoundError:
        config = None

    env_level = os.getenv("LOGLEVEL", "").upper()
    if config:
        if (
            env_level in _LOG_LEVELS
            and "loggers" in config
            and "spinext_core" in config["loggers"]
        ):
            config["loggers"]["spinext_core"]["level"] = env_level
        logging.config.dictConfig(config)
    else:
        logging.basicConfig(
            level=getattr(logging, env_level or "WARNING", logging.WARNING),
            format="%(name)s:%(levelname)s: %(message)s",
            stream=sys.stderr,
        )


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports grammar errors as UsageError."""

    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


@dataclass
class Outcome:
    params: dict[str, Any]
    result: dict[str, Any]
    seed: int | None = None
    # overrides the command's result schema when one command has several shapes
    result_def: str | None = None


class Command(ABC):
    """A ``<group> <action>`` subcommand producing one result payload."""

    group: ClassVar[str]
    action: ClassVar[str]
    help: ClassVar[str]
    result_def: ClassVar[str]
    # setting that --budget overrides for this command
    budget_setting: ClassVar[str] = "state_budget"

    @property
    def name(self) -> str:
        return f"{self.group} {self.action}"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        return None

    @abstractmethod
    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        """Run the computation and return its parameters and result."""


def _genus_arg(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("-g", "--genus", type=int, required=required, help="surface genus g")


def _form(args: argparse.Namespace, attr: str = "form") -> QuadraticRefinement:
    q = QuadraticRefinement.from_string(getattr(args, attr))
    genus = getattr(args, "genus", None)
    if genus is not None and genus != q.g:
        raise UsageError(f"--{attr} has {2 * q.g} bits but --genus is {genus}")
    return q


def _torus(args: argparse.Namespace) -> TorusSpin:
    s = TorusSpin.from_string(args.spin)
    if args.dim is not None and args.dim != s.p:
        raise UsageError(f"--spin has {s.p} bits but --dim is {args.dim}")
    return s


# -- surface ----------------------------------------------------------------


class SurfaceCountCommand(Command):
    group, action, result_def = "surface", "count", "count"
    help = "Count bounding and unbounding spin structures"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser)
        parser.add_argument(
            "--brute-force",
            action="store_true",
            help="enumerate all 2^(2g) refinements instead of using the closed form",
        )

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        g = args.genus
        formula_b, formula_u = count_formula(g)
        rec_b, rec_u = count_recurrence(g)[-1]
        if args.brute_force:
            part = enumerate_spin(g, settings)
            b, u, method = part.b, part.u, "enumeration"
        else:
            b, u, method = formula_b, formula_u, "formula"
        match = (b, u) == (formula_b, formula_u) == (rec_b, rec_u)
        return Outcome(
            {"genus": g, "brute_force": args.brute_force},
            {
                "g": g,
                "b": b,
                "u": u,
                "formula_b": formula_b,
                "formula_u": formula_u,
                "recurrence_b": rec_b,
                "recurrence_u": rec_u,
                "match": match,
                "method": method,
            },
        )


class SurfaceOrbitsCommand(Command):
    group, action, result_def = "surface", "orbits", "orbit_partition"
    help = "Orbits of the symplectic group on spin structures"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser)
        parser.add_argument("--form", help="report only the orbit of this refinement")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        g = args.genus
        if args.form is not None:
            q = _form(args)
            orbit = spin_orbit(g, q, settings)
            return Outcome(
                {"genus": g, "form": q.to_string()},
                {
                    "g": g,
                    "seed": q.to_string(),
                    "size": orbit.size,
                    "arf": arf_basis_formula(q),
                    "points": list(orbit.keys),
                },
                result_def="orbit",
            )
        b, u = count_formula(g)
        orbits = all_orbits(g, settings)
        rows = [
            {"seed": o.keys[0], "size": o.size, "arf": arf_basis_formula(o.points[0])}
            for o in orbits
        ]
        match = sorted((r["arf"], r["size"]) for r in rows) == [(0, b), (1, u)]
        return Outcome(
            {"genus": g},
            {"g": g, "orbit_count": len(rows), "b": b, "u": u, "match": match, "orbits": rows},
        )


class SurfaceWitnessCommand(Command):
    group, action, result_def = "surface", "witness-no-extension", "witness"
    help = "Find an element moving every bounding spin structure"
    budget_setting = "witness_max_tries"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser)

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        g = args.genus
        witness = no_extension_witness(g, settings, seed=args.seed)
        result = witness.to_dict()
        bound: dict[str, Any] = {
            "group_order": None,
            "stabilizer_order": None,
            "bound_lhs": None,
            "bound_ok": None,
            "union_size": None,
        }
        if g <= 3:
            check = counting_bound_check(g, settings, exact=g <= 2)
            bound = {k: v for k, v in check.to_dict().items() if k in bound}
        result.update(bound)
        return Outcome({"genus": g}, result, seed=witness.seed)


class SurfaceTransitivityCommand(Command):
    group, action, result_def = "surface", "transitivity", "transitivity"
    help = "Symplectic matrix carrying one refinement to another of equal Arf invariant"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--from", dest="from_form", required=True, help="source refinement bits")
        parser.add_argument("--to", dest="to_form", required=True, help="target refinement bits")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        q1 = QuadraticRefinement.from_string(args.from_form)
        q2 = QuadraticRefinement.from_string(args.to_form)
        m = transitivity_witness(q1, q2)
        verified = is_symplectic(q1.space, m.matrix) and pullback(q1, m) == q2
        return Outcome(
            {"from": q1.to_string(), "to": q2.to_string()},
            {
                "g": q1.g,
                "from": q1.to_string(),
                "to": q2.to_string(),
                "arf": arf_basis_formula(q1),
                "matrix": m.to_strings(),
                "verified": verified,
            },
        )


class SurfaceIndexCommand(Command):
    group, action, result_def = "surface", "index", "surface_index"
    help = "Index lower bound from the orbit of a surface spin structure"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser, required=False)
        parser.add_argument("--form", required=True, help="refinement bits")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        q = _form(args)
        orbit_size = spin_orbit(q.g, q, settings).size if q.g <= settings.g_orbit else None
        return Outcome(
            {"form": q.to_string()},
            {
                "g": q.g,
                "form": q.to_string(),
                "arf": arf_basis_formula(q),
                "index_lower_bound": index_lower_bound_surface(q),
                "orbit_size": orbit_size,
                "embedding_bound": count_formula(q.g)[0],
            },
        )


# -- quad -------------------------------------------------------------------


class QuadArfCommand(Command):
    group, action, result_def = "quad", "arf", "quad_arf"
    help = "Arf invariant by zero count, basis formula and Gauss sum"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser, required=False)
        parser.add_argument("--form", required=True, help="refinement bits")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        q = _form(args)
        opts = {"chunk": settings.enumeration_chunk, "budget": settings.state_budget}
        return Outcome(
            {"form": q.to_string()},
            {
                "g": q.g,
                "form": q.to_string(),
                "arf": arf(q, **opts),
                "zero_count": zero_count(q, **opts),
                "arf_basis_formula": arf_basis_formula(q),
                "gauss_sum": gauss_sum(q, **opts),
            },
        )


class QuadEvalCommand(Command):
    group, action, result_def = "quad", "eval", "quad_eval"
    help = "Evaluate a refinement at a vector"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser, required=False)
        parser.add_argument("--form", required=True, help="refinement bits")
        parser.add_argument("--at", required=True, help="vector bits")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        q = _form(args)
        x = q.space.vector(args.at)
        return Outcome(
            {"form": q.to_string(), "at": x.to_string()},
            {"g": q.g, "form": q.to_string(), "at": x.to_string(), "value": evaluate(q, x)},
        )


class QuadReduceCommand(Command):
    group, action, result_def = "quad", "reduce", "quad_reduce"
    help = "Symplectic change of basis to the standard form"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser, required=False)
        parser.add_argument("--form", required=True, help="refinement bits")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        q = _form(args)
        m, s = reduce_to_standard(q)
        return Outcome(
            {"form": q.to_string()},
            {
                "g": q.g,
                "form": q.to_string(),
                "arf": arf_basis_formula(s),
                "standard": s.to_string(),
                "matrix": m.to_strings(),
                "verified": pullback(s, m) == q,
            },
        )


# -- torus ------------------------------------------------------------------


def _dim_arg(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument("-p", "--dim", type=int, required=required, help="torus dimension p")


class TorusOrbitCommand(Command):
    group, action, result_def = "torus", "orbit", "torus_orbit"
    help = "Orbit of a torus spin structure under the mod 2 twist matrices"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _dim_arg(parser)
        parser.add_argument("--spin", required=True, help="difference from the Lie structure")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        s = _torus(args)
        orbit = torus_orbit(s.p, s, settings)
        return Outcome(
            {"dim": s.p, "spin": s.to_string()},
            {
                "p": s.p,
                "spin": s.to_string(),
                "lie": s.is_lie,
                "size": orbit.size,
                "points": list(orbit.keys),
            },
        )


class TorusIndexCommand(Command):
    group, action, result_def = "torus", "index", "torus_index"
    help = "Index lower bound for a torus spin structure"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _dim_arg(parser)
        parser.add_argument("--spin", required=True, help="difference from the Lie structure")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        s = _torus(args)
        return Outcome(
            {"dim": s.p, "spin": s.to_string()},
            {
                "p": s.p,
                "spin": s.to_string(),
                "lie": s.is_lie,
                "index_lower_bound": index_lower_bound_torus(s),
            },
        )


class TorusT3GateCommand(Command):
    group, action, result_def = "torus", "t3-gate", "t3_gate"
    help = "Classify a Seifert hypersurface signature for an embedded 3-torus"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--signature", type=int, required=True, help="signature (any integer)")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        verdict = t3_signature_gate(args.signature)
        return Outcome(
            {"signature": args.signature},
            {"signature": args.signature, "residue": args.signature % 16, **verdict.to_dict()},
        )


class TorusGeneratorsCommand(Command):
    group, action, result_def = "torus", "generators", "torus_generators"
    help = "Mod 2 twist matrices and the group they generate"
    budget_setting = "group_budget"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _dim_arg(parser, required=True)
        parser.add_argument(
            "--closure", action="store_true", help="also enumerate the generated group (p <= 4)"
        )

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        p = args.dim
        if not 1 <= p <= settings.p_max:
            raise OutOfRangeError(f"--dim must be in 1..{settings.p_max}, got {p}")
        pairs = [(i, j) for i in range(1, p + 1) for j in range(1, p + 1) if i != j]
        gens = [
            {"i": i, "j": j, "matrix": m.to_strings()}
            for (i, j), m in zip(pairs, twist_matrices(p), strict=True)
        ]
        closure = twist_closure(p, settings).size if args.closure else None
        return Outcome(
            {"dim": p, "closure": args.closure},
            {
                "p": p,
                "generator_count": len(gens),
                "gl_order": gl_order(p),
                "closure_order": closure,
                "generators": gens,
            },
        )


# -- group / sp -------------------------------------------------------------


def _perm_group(text: str | None, degree: int) -> PermGroupSpec:
    return PermGroupSpec(degree, tuple(parse_perm_list(text or "")))


class GroupCheckSemidirectCommand(Command):
    group, action, result_def = "group", "check-semidirect", "semidirect"
    help = "Check [N⋊H : G] <= [N : N∩G]·[H : H∩G] on permutation groups"
    budget_setting = "group_budget"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--ambient", help="';'-separated generators of the ambient group")
        parser.add_argument("--normal", help="generators of the normal factor N")
        parser.add_argument("--complement", help="generators of the complement H")
        parser.add_argument("--subgroup", help="generators of the subgroup G (empty: trivial)")
        parser.add_argument(
            "--exhaustive",
            action="store_true",
            help="check every decomposition and every subgroup of the symmetric group",
        )
        parser.add_argument("--degree", type=int, help="degree n of S_n for --exhaustive")

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        budget = settings.group_budget
        if args.exhaustive:
            return self._exhaustive(args, budget)
        if args.ambient is None or args.normal is None or args.complement is None:
            raise UsageError("--ambient, --normal and --complement are required")
        ambient_gens = parse_perm_list(args.ambient)
        if not ambient_gens and args.degree is None:
            raise UsageError("--ambient has no generators; pass --degree")
        degree = args.degree or len(ambient_gens[0])
        specs = {
            name: _perm_group(getattr(args, name), degree)
            for name in ("ambient", "normal", "complement", "subgroup")
        }
        check = semidirect_index_check(
            specs["normal"], specs["complement"], specs["subgroup"], specs["ambient"], budget
        )
        params = {name: getattr(args, name) or "" for name in specs}
        return Outcome(params, check.to_dict(), result_def="semidirect")

    def _exhaustive(self, args: argparse.Namespace, budget: int) -> Outcome:
        n = args.degree
        if n is None:
            raise UsageError("--exhaustive needs --degree")
        if not 1 <= n <= 4:
            raise OutOfRangeError(f"--degree must be in 1..4 for --exhaustive, got {n}")
        ambient = PermGroupSpec.symmetric(n)
        subgroups = all_subgroups(ambient, budget)
        decompositions = semidirect_decompositions(ambient, budget)
        checks = [
            semidirect_index_check(
                PermGroupSpec.from_group(nn),
                PermGroupSpec.from_group(hh),
                PermGroupSpec.from_group(gg),
                ambient,
                budget,
            )
            for nn, hh in decompositions
            for gg in subgroups
        ]
        return Outcome(
            {"degree": n, "exhaustive": True},
            {
                "degree": n,
                "ambient_order": len(enumerate_group(ambient, budget)),
                "subgroup_count": len(subgroups),
                "decomposition_count": len(decompositions),
                "check_count": len(checks),
                "all_ok": all(c.ok for c in checks),
            },
            result_def="semidirect_exhaustive",
        )


class SpOrderCommand(Command):
    group, action, result_def = "sp", "order", "sp_order"
    help = "Order of Sp(2g, Z/2) by a stabilizer chain"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        _genus_arg(parser)
        parser.add_argument(
            "--generators",
            choices=["chain", "all"],
            default="chain",
            help="generating set: chain transvections (default) or all transvections",
        )

    def execute(self, args: argparse.Namespace, settings: Settings) -> Outcome:
        g = args.genus
        if not 1 <= g <= settings.g_max:
            raise OutOfRangeError(f"--genus must be in 1..{settings.g_max}, got {g}")
        space = SymplecticSpace(g)
        gens = chain_transvections(space) if args.generators == "chain" else all_transvections(space)
        sizes = stabilizer_chain(space, gens)
        order = math.prod(sizes)
        return Outcome(
            {"genus": g, "generators": args.generators},
            {
                "g": g,
                "order": order,
                "formula_order": formula_order(g),
                "generator_count": len(gens),
                "orbit_sizes": sizes,
                "match": order == formula_order(g),
            },
        )


class CommandRegistry:
    """Registry for CLI commands, keyed by ``(group, action)``."""

    def __init__(self) -> None:
        commands: list[Command] = [
            SurfaceCountCommand(),
            SurfaceOrbitsCommand(),
            SurfaceWitnessCommand(),
            SurfaceTransitivityCommand(),
            SurfaceIndexCommand(),
            QuadArfCommand(),
            QuadEvalCommand(),
            QuadReduceCommand(),
            TorusOrbitCommand(),
            TorusIndexCommand(),
            TorusT3GateCommand(),
            TorusGeneratorsCommand(),
            GroupCheckSemidirectCommand(),
            SpOrderCommand(),
        ]
        self._commands: dict[tuple[str, str], Command] = {
            (c.group, c.action): c for c in commands
        }

    def get_command(self, group: str, action: str) -> Command | None:
        return self._commands.get((group, action))

    def groups(self) -> dict[str, list[Command]]:
        out: dict[str, list[Command]] = {}
        for c in self._commands.values():
            out.setdefault(c.group, []).append(c)
        return out


_GROUP_HELP = {
    "surface": "spin structures on closed surfaces",
    "quad": "quadratic refinements",
    "torus": "spin structures on tori",
    "group": "permutation group checks",
    "sp": "the symplectic group over Z/2",
}


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--format",
        choices=["json", "csv", "table"],
        default="table",
        help="output format (default: table)",
    )
    common.add_argument("--seed", type=int, default=None, help="seed for randomized searches")
    common.add_argument(
        "--budget", type=int, default=None, help="override the command's search/state budget"
    )
    common.add_argument(
        "--config", default=None, help="YAML config file (default: $SPINEXT_CONFIG)"
    )
    return common


def _build_parser(registry: CommandRegistry) -> argparse.ArgumentParser:
    ap = _Parser(
        prog="spinext",
        description="Finite computations on spin structures of surfaces and tori.",
        epilog=(
            "Exit codes:\n"
            "  0  success\n"
            "  1  computation error (budget, precondition, configuration)\n"
            "  2  usage error (unknown subcommand, malformed bits or permutations)\n\n"
            "Environment:\n"
            "  SPINEXT_BUDGET  default state budget (flags win)\n"
            "  SPINEXT_CONFIG  YAML config file (same as --config)\n"
            "  LOGLEVEL        log level of the spinext_core logger\n"
        ),
        formatter_class=argparse.RawTextHelpFormatter,
    )
    common = _common_flags()
    groups = ap.add_subparsers(dest="group", required=True, metavar="GROUP")
    for group, commands in registry.groups().items():
        gp = groups.add_parser(group, help=_GROUP_HELP.get(group, ""))
        actions = gp.add_subparsers(dest="action", required=True, metavar="ACTION")
        for command in commands:
            p = actions.add_parser(command.action, help=command.help, parents=[common])
            command.add_arguments(p)
    return ap


def _emit_error(exc: BaseException, type_name: str, command: str | None, err: TextIO) -> None:
    payload = {"error": {"type": type_name, "message": str(exc), "command": command}}
    print(json.dumps(payload, sort_keys=True), file=err)


def _print_version(out: TextIO) -> None:
    print(
        f"spinext {get_version()} (output schema supported: {supported_output_range_str()}; "
        f"config supported: {supported_config_range_str()})",
        file=out,
    )


def run(
    argv: list[str] | None = None,
    *,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Parse ``argv``, run one subcommand and print its output; return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    registry = CommandRegistry()
    ap = _build_parser(registry)

    if not argv:
        ap.print_help(err)
        return 2
    if argv[0] in {"--version", "-V"}:
        _print_version(out)
        return 0
    if argv[0] == "--list-templates":
        for it in list_templates():
            print(f"{it.get('id')}: {it.get('description', '').strip()}", file=out)
        return 0

    command_name: str | None = None
    try:
        args = ap.parse_args(argv)
        command = registry.get_command(args.group, args.action)
        if command is None:  # pragma: no cover
            raise UsageError(f"unknown command {args.group} {args.action}")
        command_name = command.name
        settings = load_settings(args.config, **{command.budget_setting: args.budget})
        logger.debug("running %s with %s", command_name, settings)
        outcome = command.execute(args, settings)
        envelope = OutputEnvelope(command_name, outcome.params, outcome.result, outcome.seed)
        validate_envelope(envelope, outcome.result_def or command.result_def)
        print(render(envelope, args.format), file=out)
        return 0
    except SystemExit as e:
        # --help inside a subcommand
        return int(e.code or 0)
    except (UsageError, OutOfRangeError) as e:
        _emit_error(e, type(e).__name__, command_name, err)
        return 2
    except SpinExtError as e:
        _emit_error(e, type(e).__name__, command_name, err)
        return 1
    except Exception as e:
        logger.debug("unexpected failure", exc_info=True)
        _emit_error(e, "InternalError", command_name, err)
        return 1


def main() -> None:
    """Main CLI entry point using Command pattern."""
    setup_logging()
    sys.exit(run(sys.argv[1:]))


__all__ = ["main", "run"]
