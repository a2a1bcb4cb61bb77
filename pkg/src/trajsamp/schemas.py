"""Pydantic wire models and converters between JSON payloads and core objects.

These models define the service request/response contracts and the on-disk
JSON/CSV artifact formats.  Core objects stay plain numpy-backed dataclasses;
everything crossing the HTTP or filesystem boundary goes through here.
"""

from __future__ import annotations

import io
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from . import design as design_mod
from . import field as field_mod
from . import trajectory as traj_mod
from .geometry import ConvexBody
from .nyquist import NyquistVerdict


# ------------------------------------------------------------- convex body


class BallSpec(BaseModel):
    center: list[float]
    radius: float


class HalfspaceSpec(BaseModel):
    a: list[float]
    b: float


class BodyModel(BaseModel):
    """{"dim": d, "ball" | "vertices" | "halfspaces": ..., "symmetric": bool}"""

    dim: int
    ball: Optional[BallSpec] = None
    vertices: Optional[list[list[float]]] = None
    halfspaces: Optional[list[HalfspaceSpec]] = None
    symmetric: bool = False

    @model_validator(mode="after")
    def _one_repr(self):
        given = [x is not None for x in (self.ball, self.vertices, self.halfspaces)]
        if sum(given) != 1:
            raise ValueError("exactly one of ball/vertices/halfspaces required")
        return self

    def to_body(self) -> ConvexBody:
        if self.ball is not None:
            body = ConvexBody.ball(self.ball.center, self.ball.radius,
                                   symmetric=self.symmetric or None)
            if body.dim != self.dim:
                raise ValueError("dim mismatch in body payload")
            return body
        if self.vertices is not None:
            body = ConvexBody.from_vertices(self.vertices, symmetric=self.symmetric)
        else:
            A = [h.a for h in self.halfspaces]
            b = [h.b for h in self.halfspaces]
            body = ConvexBody.from_halfspaces(A, b, symmetric=self.symmetric)
        if body.dim != self.dim:
            raise ValueError("dim mismatch in body payload")
        return body

    @classmethod
    def from_body(cls, body: ConvexBody) -> "BodyModel":
        if body.kind == "ball":
            return cls(dim=body.dim, symmetric=body.symmetric,
                       ball=BallSpec(center=body.center.tolist(),
                                     radius=body.radius))
        return cls(dim=body.dim, symmetric=body.symmetric,
                   halfspaces=[HalfspaceSpec(a=a.tolist(), b=float(b))
                               for a, b in zip(body.A, body.b)])


# ---------------------------------------------------------- trajectory sets


class UniformLines2DModel(BaseModel):
    kind: Literal["uniform_lines_2d"] = "uniform_lines_2d"
    w: list[float]
    v: list[float]
    delta: float


class UnionUniform2DModel(BaseModel):
    kind: Literal["union_uniform_2d"] = "union_uniform_2d"
    parts: list[UniformLines2DModel]


class UniformLinesDModel(BaseModel):
    kind: Literal["uniform_lines_d"] = "uniform_lines_d"
    basis: list[list[float]]
    w: Optional[list[float]] = None


class CircleSetModel(BaseModel):
    kind: Literal["circles"] = "circles"
    delta: float


class SpiralSetModel(BaseModel):
    kind: Literal["spirals"] = "spirals"
    c: float
    n: int


class HyperplaneSetModel(BaseModel):
    kind: Literal["hyperplanes"] = "hyperplanes"
    w: list[float]
    h: list[float]
    delta: float


class UnionHyperplanesModel(BaseModel):
    kind: Literal["union_hyperplanes"] = "union_hyperplanes"
    parts: list[HyperplaneSetModel]


SetModel = Annotated[
    Union[UniformLines2DModel, UnionUniform2DModel, UniformLinesDModel,
          CircleSetModel, SpiralSetModel, HyperplaneSetModel,
          UnionHyperplanesModel],
    Field(discriminator="kind"),
]


def to_set(model) -> object:
    if isinstance(model, UniformLines2DModel):
        return traj_mod.UniformLines2D(np.array(model.w), np.array(model.v),
                                       model.delta)
    if isinstance(model, UnionUniform2DModel):
        return traj_mod.UnionUniform2D(tuple(to_set(p) for p in model.parts))
    if isinstance(model, UniformLinesDModel):
        w = None if model.w is None else np.array(model.w)
        return traj_mod.UniformLinesD(np.array(model.basis), w)
    if isinstance(model, CircleSetModel):
        return traj_mod.CircleSet(model.delta)
    if isinstance(model, SpiralSetModel):
        return traj_mod.SpiralSet(model.c, model.n)
    if isinstance(model, HyperplaneSetModel):
        return traj_mod.HyperplaneSet(np.array(model.w), np.array(model.h),
                                      model.delta)
    if isinstance(model, UnionHyperplanesModel):
        return traj_mod.UnionHyperplanes(tuple(to_set(p) for p in model.parts))
    raise TypeError(f"unknown set model {type(model).__name__}")


def from_set(s) -> BaseModel:
    if isinstance(s, traj_mod.UniformLines2D):
        return UniformLines2DModel(w=s.w.tolist(), v=s.v.tolist(), delta=s.delta)
    if isinstance(s, traj_mod.UnionUniform2D):
        return UnionUniform2DModel(parts=[from_set(p) for p in s.parts])
    if isinstance(s, traj_mod.UniformLinesD):
        return UniformLinesDModel(basis=s.basis.tolist(),
                                  w=None if s.w is None else s.w.tolist())
    if isinstance(s, traj_mod.CircleSet):
        return CircleSetModel(delta=s.delta)
    if isinstance(s, traj_mod.SpiralSet):
        return SpiralSetModel(c=s.c, n=s.n)
    if isinstance(s, traj_mod.HyperplaneSet):
        return HyperplaneSetModel(w=s.w.tolist(), h=s.h.tolist(), delta=s.delta)
    if isinstance(s, traj_mod.UnionHyperplanes):
        return UnionHyperplanesModel(parts=[from_set(p) for p in s.parts])
    raise TypeError(f"unknown set type {type(s).__name__}")


# ------------------------------------------------------------------ fields


class AtomModel(BaseModel):
    omega: list[float]
    re: float
    im: float


class FieldModel(BaseModel):
    """{"dim": d, "atoms": [{"omega": [...], "re": x, "im": y}]}"""

    dim: int
    atoms: list[AtomModel]

    def to_field(self, omega_ref: ConvexBody) -> field_mod.AtomField:
        if not self.atoms:
            return field_mod.AtomField(np.zeros((0, self.dim)),
                                       np.zeros(0, dtype=complex), omega_ref)
        om = np.array([a.omega for a in self.atoms])
        co = np.array([complex(a.re, a.im) for a in self.atoms])
        return field_mod.AtomField(om, co, omega_ref)

    @classmethod
    def from_field(cls, fld: field_mod.AtomField) -> "FieldModel":
        atoms = [AtomModel(omega=w.tolist(), re=float(c.real), im=float(c.imag))
                 for w, c in zip(fld.omegas, fld.coeffs)]
        return cls(dim=fld.dim, atoms=atoms)


class FieldSpecModel(BaseModel):
    """Recipe for a seeded random field instead of explicit atoms."""

    n_atoms: int = 8
    margin: float = 0.05
    seed: int = 0


class WindowModel(BaseModel):
    center: list[float]
    radius: float

    def to_window(self) -> traj_mod.Window:
        return traj_mod.Window(np.array(self.center), self.radius)


# ----------------------------------------------------------------- verdicts


class VerdictModel(BaseModel):
    status: str
    basis: str
    witness: Optional[list[float]] = None
    notes: list[str] = []

    @classmethod
    def from_verdict(cls, v: NyquistVerdict) -> "VerdictModel":
        witness = None if v.witness is None else [float(x) for x in np.atleast_1d(v.witness)]
        return cls(status=v.status, basis=v.basis, witness=witness,
                   notes=list(v.notes))


# ------------------------------------------------------- request / response


class CheckRequest(BaseModel):
    omega: BodyModel
    set: SetModel


class CheckResponse(BaseModel):
    verdict: VerdictModel
    exit_code: int


class DesignRequest(BaseModel):
    omega: BodyModel
    mode: Literal["uniform_2d", "hyperplane", "uniform_d_closed_form",
                  "uniform_d_orientation_grid"]
    epsilon: float
    k_orientations: int = 256


class DesignResponse(BaseModel):
    set: SetModel
    density: float
    epsilon: float
    critical_density: float
    orientation: list[list[float]]
    verdict: VerdictModel


class DensityRequest(BaseModel):
    set: SetModel


class DensityResponse(BaseModel):
    density: float


class SampleRequest(BaseModel):
    set: SetModel
    window: WindowModel
    eps: float
    omega: Optional[BodyModel] = None
    field: Optional[FieldModel] = None
    field_spec: Optional[FieldSpecModel] = None


class SampleResponse(BaseModel):
    n_points: int
    csv: str


class ReconstructRequest(BaseModel):
    omega: BodyModel
    set: SetModel
    window: WindowModel
    eps: float
    field: Optional[FieldModel] = None
    field_spec: Optional[FieldSpecModel] = None
    probe_per_axis: int = 64

    @model_validator(mode="after")
    def _one_field(self):
        if (self.field is None) == (self.field_spec is None):
            raise ValueError("give exactly one of field / field_spec")
        return self


class ReconstructResponse(BaseModel):
    sup_error: float
    rms_error: float
    certified: bool
    verdict_status: str
    estimate: FieldModel
    n_samples: int
    samples_csv: str


class SweepSpec(BaseModel):
    start: float
    stop: float
    steps: int = 101


class ReportRequest(BaseModel):
    omega: BodyModel
    set: SetModel
    sweep: SweepSpec


class ReportRow(BaseModel):
    delta: float
    status: str
    density: float


class ReportResponse(BaseModel):
    rows: list[ReportRow]
    csv: str


# ----------------------------------------------------------- CSV rendering


def batch_to_csv(batch: traj_mod.SampleBatch) -> str:
    """part,param,x1..xd[,re,im] per sample row."""
    buf = io.StringIO()
    cols = ["part", "param"] + [f"x{i + 1}" for i in range(batch.dim)]
    if batch.values is not None:
        cols += ["re", "im"]
    buf.write(",".join(cols) + "\n")
    for k in range(len(batch)):
        row = [str(int(batch.part[k])), repr(float(batch.param[k]))]
        row += [repr(float(x)) for x in batch.points[k]]
        if batch.values is not None:
            row += [repr(float(batch.values[k].real)),
                    repr(float(batch.values[k].imag))]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def report_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    buf.write("delta,verdict,density\n")
    for r in rows:
        buf.write(f"{r.delta!r},{r.status},{r.density!r}\n")
    return buf.getvalue()


# -------------------------------------------------------- sweep set scaling


def with_spacing(s, target: float):
    """Rescale the set's spacing parameters so its reference spacing is target."""
    ref = traj_mod.spacing_scale(s)
    factor = target / ref
    if isinstance(s, traj_mod.UniformLines2D):
        return traj_mod.UniformLines2D(s.w, s.v, s.delta * factor)
    if isinstance(s, traj_mod.UnionUniform2D):
        return traj_mod.UnionUniform2D(tuple(
            traj_mod.UniformLines2D(p.w, p.v, p.delta * factor) for p in s.parts))
    if isinstance(s, traj_mod.UniformLinesD):
        B = s.basis.copy()
        B[:-1] *= factor
        return traj_mod.UniformLinesD(B, s.w)
    if isinstance(s, traj_mod.CircleSet):
        return traj_mod.CircleSet(s.delta * factor)
    if isinstance(s, traj_mod.SpiralSet):
        return traj_mod.SpiralSet(s.c * factor, s.n)
    if isinstance(s, traj_mod.HyperplaneSet):
        return traj_mod.HyperplaneSet(s.w, s.h, s.delta * factor)
    if isinstance(s, traj_mod.UnionHyperplanes):
        return traj_mod.UnionHyperplanes(tuple(
            traj_mod.HyperplaneSet(p.w, p.h, p.delta * factor) for p in s.parts))
    raise TypeError(f"cannot rescale {type(s).__name__}")


def design_to_response(result: design_mod.DesignResult) -> DesignResponse:
    orientation = np.atleast_2d(np.asarray(result.orientation, dtype=float))
    return DesignResponse(
        set=from_set(result.set),
        density=result.density,
        epsilon=result.epsilon,
        critical_density=result.critical_density,
        orientation=orientation.tolist(),
        verdict=VerdictModel.from_verdict(result.verdict),
    )
