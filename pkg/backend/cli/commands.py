import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Literal, Optional

import click
from pydantic import BaseModel, model_validator

from backend.bounds.lsb import find_preset, lsb_bound
from backend.config import settings
from backend.core.exception_handler import BadConfig, HamiltonianError
from backend.gibbs.solver import load_hamiltonian, solve_gibbs
from backend.optimal.curve import curve_frame, energy_grid, entropy_curve
from backend.optimal.hamiltonian import optimal_hamiltonian
from backend.oracle.lemmas import verify_all
from backend.spectra.spectrum import GeometricSpectrum, LinearSpectrum, UniformSpectrum, parse_spectrum_source

logger = logging.getLogger(__name__)

Units = Literal["nats", "bits"]


class GridSpec(BaseModel):
    E_min: float
    E_max: float
    points: int

    @model_validator(mode="after")
    def ordered(self):
        if not 0 < self.E_min < self.E_max:
            raise ValueError(f"grid needs 0 < min < max, got {self.E_min}:{self.E_max}")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """'min:max:points'"""
        parts = text.split(":")
        if len(parts) != 3:
            raise BadConfig(f"grid must look like min:max:points, got '{text}'")
        try:
            return cls(E_min=float(parts[0]), E_max=float(parts[1]), points=int(parts[2]))
        except ValueError as e:
            raise BadConfig(f"invalid grid '{text}': {e}")


class RunConfig(BaseModel):
    """하위 명령 하나의 실행 설정"""

    subcommand: Literal["optimal", "curve", "gibbs", "lsb", "verify", "figures"]
    spectrum: Optional[str] = None
    hamiltonian: Optional[str] = None
    E0: float = 1.0
    E: Optional[float] = None
    eps: Optional[float] = None
    grid: Optional[GridSpec] = None
    characteristic: Optional[str] = None
    output: Optional[str] = None
    units: Units = settings.DEFAULT_UNITS
    seed: int = settings.ORACLE_SEED
    trials: Optional[int] = None
    levels: int = settings.LEVELS_PREVIEW
    reference: bool = False
    as_json: bool = False

    @model_validator(mode="after")
    def required_inputs(self):
        needs = {
            "optimal": ("spectrum", "E"),
            "curve": ("spectrum", "grid"),
            "gibbs": ("hamiltonian", "E"),
            "lsb": ("spectrum", "eps", "characteristic"),
        }
        missing = [name for name in needs.get(self.subcommand, ()) if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.subcommand} needs {', '.join(missing)}")
        return self


def _scale(units: Units) -> float:
    return math.log(2) if units == "bits" else 1.0


def _emit(payload: dict, as_json: bool, output: Optional[str] = None) -> None:
    if as_json or output:
        text = json.dumps(payload, indent=2, ensure_ascii=False, default=str)
        if output:
            Path(output).write_text(text + "\n", encoding="utf-8")
        else:
            click.echo(text)
        return
    for key, value in payload.items():
        click.echo(f"{key}: {value}")


def _run_optimal(config: RunConfig) -> int:
    spec = parse_spectrum_source(config.spectrum)
    H = optimal_hamiltonian(spec, config.E0, config.E)
    unit = _scale(config.units)
    levels = [float(h) for h in H.levels(config.levels)]
    # 유한 랭크: 랭크 밖 준위는 +∞
    levels += [math.inf] * (config.levels - len(levels))
    _emit({
        "case": H.case.value,
        "m": H.m,
        "theta": H.theta,
        "beta_m": H.beta,
        "C": H.C,
        "D": H.D,
        "levels": levels,
        f"S_opt [{config.units}]": H.entropy / unit,
        "gibbs_condition": H.satisfies_gibbs_condition,
    }, config.as_json, config.output)
    return 0


def _write_curve(spec, E0: float, grid: List[float], reference: bool, units: Units, output: Optional[str]) -> None:
    frame = curve_frame(entropy_curve(spec, E0, grid, reference=reference), units)
    if output and output != "-":
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(output, index=False, float_format="%.12g")
        logger.info(f"wrote {len(frame)} rows to {output}")
    else:
        click.echo(frame.to_csv(index=False, float_format="%.12g"), nl=False)


def _run_curve(config: RunConfig) -> int:
    spec = parse_spectrum_source(config.spectrum)
    grid = energy_grid(config.grid.E_min, config.grid.E_max, config.grid.points)
    _write_curve(spec, config.E0, grid, config.reference, config.units, config.output)
    return 0


def _run_gibbs(config: RunConfig) -> int:
    H = load_hamiltonian(config.hamiltonian)
    state = solve_gibbs(H, config.E, preview=config.levels)
    unit = _scale(config.units)
    _emit({
        "beta": state.beta,
        "mean_energy": state.mean_energy,
        f"entropy [{config.units}]": state.entropy / unit,
        "uniform": state.finite_dim_uniform,
        "weights": state.weights[:config.levels],
    }, config.as_json, config.output)
    return 0


def _run_lsb(config: RunConfig) -> int:
    spec = parse_spectrum_source(config.spectrum)
    result = lsb_bound(spec, config.eps, find_preset(config.characteristic))
    unit = _scale(config.units)
    payload = result.model_dump(mode="json")
    for key in ("main_term", "envelope", "value"):
        payload[key] = payload[key] / unit
    payload["units"] = config.units
    _emit(payload, config.as_json, config.output)
    return 0


def _run_verify(config: RunConfig) -> int:
    reports = verify_all(seed=config.seed, trials=config.trials)
    payload = {"seed": config.seed, "reports": [r.summary() for r in reports]}
    _emit(payload, True, config.output)
    failed = [r.claim for r in reports if not r.passed]
    if failed:
        click.secho(f"failed claims: {', '.join(failed)}", fg="red", bold=True, err=True)
        return 1
    click.secho(f"all {len(reports)} reports passed", fg="green", bold=True, err=True)
    return 0


def _run_figures(config: RunConfig) -> int:
    """기준 곡선 5종(균일, 선형, 기하 E0=1,10,100)을 CSV로 저장"""
    out = Path(config.output or "figures")
    points = config.grid.points if config.grid else 200
    jobs = [
        ("fig1_uniform10.csv", UniformSpectrum(10), 1.0, energy_grid(0.05, 3.0, points), False),
        ("fig2_linear10.csv", LinearSpectrum(10), 1.0, energy_grid(0.05, 8.0, points), False),
    ]
    for index, E0 in enumerate((1.0, 10.0, 100.0), start=3):
        jobs.append((f"fig{index}_geometric_E0_{E0:g}.csv", GeometricSpectrum.from_energy(E0), E0,
                     energy_grid(0.05 * E0, 5.0 * E0, points), True))
    for name, spec, E0, grid, reference in jobs:
        _write_curve(spec, E0, grid, reference, config.units, str(out / name))
        click.echo(f"  - {out / name}")
    return 0


RUNNERS = {
    "optimal": _run_optimal,
    "curve": _run_curve,
    "gibbs": _run_gibbs,
    "lsb": _run_lsb,
    "verify": _run_verify,
    "figures": _run_figures,
}


def run(config: RunConfig) -> int:
    """설정에 맞는 하위 명령 실행, 종료 코드 반환"""
    logger.debug(f"run {config.subcommand}: {config.model_dump(exclude_none=True)}")
    return RUNNERS[config.subcommand](config)


def _execute(ctx: click.Context, **fields) -> None:
    try:
        config = RunConfig(subcommand=ctx.info_name, **fields)
    except ValueError as e:
        click.secho(f"Invalid arguments: {e}", fg="red", bold=True, err=True)
        ctx.exit(BadConfig.exit_code)
    try:
        code = run(config)
    except HamiltonianError as e:
        click.secho(f"{type(e).__name__}: {e.message}", fg="red", bold=True, err=True)
        ctx.exit(e.exit_code)
    ctx.exit(code)


def _grid(ctx, param, value):
    if value is None:
        return None
    try:
        return GridSpec.parse(value)
    except BadConfig as e:
        raise click.BadParameter(e.message)


spectrum_option = click.option("-s", "--spectrum", required=True,
                               help="uniform:N, linear:N, geometric:E0, explicit:p1,p2,... or a JSON file.")
units_option = click.option("--units", type=click.Choice(["nats", "bits"]), default=settings.DEFAULT_UNITS,
                            show_default=True, help="Entropy units.")
output_option = click.option("-o", "--output", default=None, help="Output file (stdout if omitted).")


@click.group()
@click.option("--log-level", default=settings.LOG_LEVEL, show_default=True, help="Logging level.")
def cli(log_level):
    """최적 접지 해밀토니안과 최소 Gibbs 엔트로피"""
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@spectrum_option
@click.option("--E0", "E0", type=float, default=1.0, show_default=True, help="Energy budget Tr Hρ.")
@click.option("--E", "E", type=float, required=True, help="Target mean energy.")
@click.option("--levels", type=int, default=settings.LEVELS_PREVIEW, show_default=True, help="Levels to print.")
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@units_option
@output_option
@click.pass_context
def optimal(ctx, **fields):
    """H(ρ,E0,E) 구성 후 파라미터 출력"""
    _execute(ctx, **fields)


@cli.command()
@spectrum_option
@click.option("--E0", "E0", type=float, default=1.0, show_default=True, help="Energy budget Tr Hρ.")
@click.option("--grid", required=True, callback=_grid, help="Energy grid min:max:points.")
@click.option("--reference", is_flag=True, help="Add the oscillator column S_ref = g(E).")
@units_option
@output_option
@click.pass_context
def curve(ctx, **fields):
    """최소 엔트로피 곡선을 CSV 로 저장"""
    _execute(ctx, **fields)


@cli.command()
@click.option("-H", "--hamiltonian", required=True, type=click.Path(exists=True), help="Level file (JSON).")
@click.option("--E", "E", type=float, required=True, help="Target mean energy.")
@click.option("--levels", type=int, default=settings.LEVELS_PREVIEW, show_default=True, help="Weights to print.")
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@units_option
@output_option
@click.pass_context
def gibbs(ctx, **fields):
    """사용자 해밀토니안의 Gibbs 방정식 풀기"""
    _execute(ctx, **fields)


@cli.command()
@spectrum_option
@click.option("-c", "--characteristic", required=True, help="Preset key or name.")
@click.option("--eps", type=float, required=True, help="Distance ε in (0, 1].")
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@units_option
@output_option
@click.pass_context
def lsb(ctx, **fields):
    """특성량 프리셋의 하반연속성 한계 계산"""
    _execute(ctx, **fields)


@cli.command()
@click.option("--seed", type=int, default=settings.ORACLE_SEED, show_default=True, help="Random seed.")
@click.option("--trials", type=int, default=None, help="Trials per randomized check.")
@output_option
@click.pass_context
def verify(ctx, **fields):
    """전체 오라클 검증 후 JSON 보고서 출력"""
    _execute(ctx, **fields)


@cli.command()
@click.option("-o", "--output", default="figures", show_default=True, help="Output directory.")
@click.option("--grid", default=None, callback=_grid, help="Only the point count is used: min:max:points.")
@units_option
@click.pass_context
def figures(ctx, **fields):
    """그림용 CSV 5개 저장"""
    _execute(ctx, **fields)
