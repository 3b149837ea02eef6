"""File formats: CSV ingestion with line-numbered errors, geometry JSON,
and solution export."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .aero import EfficiencyTable
from .beam import ArmGeometry, BeamSolution, Segment
from .deflection import THROTTLE_UNIT_PER_PCT, DeflectionModelCoeffs, DeflectionSample
from .errors import ParseError
from .material import FlexuralSample, GridPattern, StressStrainCurve


def _read_csv_rows(path: str | Path, expected_header: list[str]) -> list[tuple[int, list[float]]]:
    """Rows of a numeric CSV as (line_number, values), header validated."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError("file is empty", line=1, path=str(path)) from None
            if [h.strip() for h in header] != expected_header:
                raise ParseError(
                    f"expected header {','.join(expected_header)!r}, got {','.join(header)!r}",
                    line=1,
                    path=str(path),
                )
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(expected_header):
                    raise ParseError(
                        f"expected {len(expected_header)} columns, got {len(row)}",
                        line=lineno,
                        path=str(path),
                    )
                try:
                    rows.append((lineno, [float(c) for c in row]))
                except ValueError as exc:
                    raise ParseError(str(exc), line=lineno, path=str(path)) from None
            return rows
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None


def read_stress_strain_csv(
    path: str | Path, infill_rate: float = 0.0, grid_pattern: GridPattern = GridPattern.CUBIC
) -> StressStrainCurve:
    """Load a `strain,stress_pa` CSV into a stress-strain curve."""
    rows = _read_csv_rows(path, ["strain", "stress_pa"])
    if not rows:
        raise ParseError("no data rows", line=2, path=str(path))
    try:
        return StressStrainCurve(
            tuple((strain, stress) for _, (strain, stress) in rows),
            infill_rate=infill_rate,
            grid_pattern=grid_pattern,
        )
    except ValueError as exc:
        raise ParseError(str(exc), line=rows[0][0], path=str(path)) from None


def read_flexural_csv(path: str | Path) -> list[FlexuralSample]:
    """Load a `force_n,deflection_m` CSV into flexural samples."""
    rows = _read_csv_rows(path, ["force_n", "deflection_m"])
    if not rows:
        raise ParseError("no data rows", line=2, path=str(path))
    samples = []
    for lineno, (force, deflection) in rows:
        try:
            samples.append(FlexuralSample(force=force, tip_deflection=deflection))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, path=str(path)) from None
    return samples


def read_efficiency_csv(path: str | Path) -> EfficiencyTable:
    """Load a `rpm,eta` CSV into an efficiency table."""
    rows = _read_csv_rows(path, ["rpm", "eta"])
    if not rows:
        raise ParseError("no data rows", line=2, path=str(path))
    try:
        return EfficiencyTable(tuple((rpm, eta) for _, (rpm, eta) in rows))
    except ValueError as exc:
        raise ParseError(str(exc), line=rows[0][0], path=str(path)) from None


def read_deflection_sweep_csv(path: str | Path) -> list[DeflectionSample]:
    """Load a `rho_percent,throttle_pct,alpha_deg` CSV; throttle percent is
    converted to throttle units."""
    rows = _read_csv_rows(path, ["rho_percent", "throttle_pct", "alpha_deg"])
    if not rows:
        raise ParseError("no data rows", line=2, path=str(path))
    samples = []
    for lineno, (rho, pct, alpha) in rows:
        try:
            samples.append(
                DeflectionSample(
                    infill_rate=rho, throttle=pct * THROTTLE_UNIT_PER_PCT, angle=alpha
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, path=str(path)) from None
    return samples


def read_arm_geometry_json(path: str | Path) -> ArmGeometry:
    """Load the arm geometry JSON schema.

    Expected keys: segments (list of {beta_deg, length_mm}), inertia_m4
    (per segment), half_depth_m, alpha0_deg, motor_station,
    linear_density_kg_m.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, path=str(path)) from None
    try:
        segments = tuple(
            Segment(fold_angle_deg=s["beta_deg"], length=s["length_mm"] * 1e-3)
            for s in payload["segments"]
        )
        return ArmGeometry(
            segments=segments,
            section_inertia=tuple(payload["inertia_m4"]),
            section_half_depth=payload["half_depth_m"],
            initial_droop_deg=payload.get("alpha0_deg", 0.0),
            motor_station=payload.get("motor_station", 1.0),
            linear_density=payload.get("linear_density_kg_m", 0.0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad geometry: {exc}", path=str(path)) from None


def read_deflection_coeffs_json(path: str | Path) -> DeflectionModelCoeffs:
    """Load deflection coefficients JSON with keys a1, a2, b1, b2, alpha0_deg."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, path=str(path)) from None
    try:
        return DeflectionModelCoeffs(
            a1=payload["a1"],
            a2=payload["a2"],
            b1=payload["b1"],
            b2=payload["b2"],
            alpha0=payload.get("alpha0_deg", 0.0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad coefficients: {exc}", path=str(path)) from None


def write_solution_csv(path: str | Path, solution: BeamSolution) -> None:
    """Export a solved centerline as `s_m,x_m,z_m,theta_rad`."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s_m", "x_m", "z_m", "theta_rad"])
        for s, x, z, theta in solution.stations:
            writer.writerow([f"{s:.9g}", f"{x:.9g}", f"{z:.9g}", f"{theta:.9g}"])
