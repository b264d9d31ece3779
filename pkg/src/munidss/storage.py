"""Project and portfolio files: strict decoding, canonical encoding, storage.

Files are JSON with a format_version envelope. Decoding is strict — unknown
fields are rejected so typos in hand-edited files surface instead of being
silently ignored. Encoding is canonical: object keys sorted, arrays in id
order (guaranteed by Project construction), floats quantized to 12
significant digits; equal projects therefore produce byte-identical files
and save -> load -> save is a fixed point.

Writes go to a temp file in the destination directory followed by an atomic
rename, so a crash leaves either the old or the new bytes, never a torn file.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import replace
from datetime import date
from pathlib import Path
from typing import Any, Iterable

from munidss.domain import (
    AggregationPolicy,
    CriticalityConfig,
    CriticalityThresholds,
    ImpactEstimate,
    Indicator,
    IndicatorKind,
    MfType,
    MunicipalProfile,
    PermittedRange,
    Project,
    SedLevel,
    TargetIndicator,
    require_valid,
)
from munidss.errors import (
    ConflictError,
    NotFoundError,
    ParseError,
    ValidationError,
    Violation,
)
from munidss.planning import DocumentKind, DocumentRecord

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# canonical encoding


def _quantize(value: Any) -> Any:
    if isinstance(value, float):
        return float(format(value, ".12g"))
    if isinstance(value, dict):
        return {key: _quantize(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_quantize(item) for item in value]
    return value


def canonical_json(payload: dict) -> str:
    return json.dumps(_quantize(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def project_to_payload(project: Project) -> dict:
    """Project as a plain JSON-ready dict (the wire and file representation)."""
    payload: dict[str, Any] = {
        "id": project.id,
        "revision": project.revision,
        "profile": _profile_payload(project.profile),
        "indicators": [_indicator_payload(i) for i in project.indicators],
        "targets": [{"id": t.id, "name": t.name} for t in project.targets],
        "estimates": [
            {"expert_id": e.expert_id, "source": e.source, "sink": e.sink, "value": e.value}
            for e in project.estimates
        ],
        "ranges": [_range_payload(r) for r in project.ranges],
        "criticality_config": {
            tid: {"critical": th.critical, "significant": th.significant, "moderate": th.moderate}
            for tid, th in sorted(project.criticality_config.thresholds.items())
        },
        "aggregation_policy": project.aggregation_policy.value,
    }
    return payload


def _profile_payload(profile: MunicipalProfile) -> dict:
    out: dict[str, Any] = {
        "mf_type": profile.mf_type.value,
        "sed_level": profile.sed_level.value,
        "rural_settlement_count": profile.rural_settlement_count,
    }
    if profile.mf_type_detail:
        out["mf_type_detail"] = profile.mf_type_detail
    return out


def _indicator_payload(indicator: Indicator) -> dict:
    out: dict[str, Any] = {
        "id": indicator.id,
        "name": indicator.name,
        "kind": indicator.kind.value,
        "current_value": indicator.current_value,
    }
    if indicator.unit is not None:
        out["unit"] = indicator.unit
    return out


def _range_payload(rng: PermittedRange) -> dict:
    out: dict[str, Any] = {"indicator_id": rng.indicator_id}
    if rng.lo is not None:
        out["lo"] = rng.lo
    if rng.hi is not None:
        out["hi"] = rng.hi
    if rng.allowed is not None:
        out["allowed"] = sorted(rng.allowed)
    return out


# ---------------------------------------------------------------------------
# strict decoding


def _fail(code: str, message: str, where: str):
    raise ValidationError(f"{message} ({where})", [Violation(code, message, where)])


def _obj(value: Any, where: str, required: set[str], optional: set[str]) -> dict:
    if not isinstance(value, dict):
        _fail("WRONG_TYPE", "expected an object", where)
    for key in value:
        if key not in required and key not in optional:
            _fail("UNKNOWN_FIELD", f"unknown field {key!r}", where)
    for key in required:
        if key not in value:
            _fail("MISSING_FIELD", f"missing required field {key!r}", where)
    return value


def _str(obj: dict, key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        _fail("WRONG_TYPE", f"field {key!r} must be a string", where)
    return value


def _num(value: Any, key: str, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail("WRONG_TYPE", f"field {key!r} must be a number", where)
    return float(value)


def _int(obj: dict, key: str, where: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        _fail("WRONG_TYPE", f"field {key!r} must be an integer", where)
    return value


def _list(obj: dict, key: str, where: str) -> list:
    value = obj.get(key, [])
    if not isinstance(value, list):
        _fail("WRONG_TYPE", f"field {key!r} must be an array", where)
    return value


def _enum(enum_cls, value: Any, key: str, where: str):
    if not isinstance(value, str):
        _fail("WRONG_TYPE", f"field {key!r} must be a string", where)
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        _fail("BAD_ENUM", f"field {key!r} must be one of: {allowed}", where)


def payload_to_project(payload: Any) -> Project:
    """Decode a project payload strictly, then check every invariant.

    Raises ValidationError with machine-readable codes for schema problems
    (unknown/missing fields, wrong types) and, once decoded, with the full
    invariant report from validate_project.
    """
    obj = _obj(
        payload,
        "project",
        required={"id", "profile", "indicators", "targets"},
        optional={"estimates", "ranges", "criticality_config", "aggregation_policy", "revision"},
    )
    where = "project"
    profile_obj = _obj(
        obj["profile"],
        "project.profile",
        required={"mf_type", "sed_level", "rural_settlement_count"},
        optional={"mf_type_detail"},
    )
    profile = MunicipalProfile(
        mf_type=_enum(MfType, profile_obj["mf_type"], "mf_type", "project.profile"),
        sed_level=_enum(SedLevel, profile_obj["sed_level"], "sed_level", "project.profile"),
        rural_settlement_count=_int(profile_obj, "rural_settlement_count", "project.profile"),
        mf_type_detail=profile_obj.get("mf_type_detail", ""),
    )

    indicators = []
    for i, item in enumerate(_list(obj, "indicators", where)):
        iw = f"project.indicators[{i}]"
        rec = _obj(item, iw, required={"id", "name", "kind", "current_value"}, optional={"unit"})
        kind = _enum(IndicatorKind, rec["kind"], "kind", iw)
        current = rec["current_value"]
        if kind is IndicatorKind.QUANTITATIVE:
            current = _num(current, "current_value", iw)
        elif not isinstance(current, str):
            _fail("WRONG_TYPE", "qualitative current_value must be a label string", iw)
        unit = rec.get("unit")
        if unit is not None and not isinstance(unit, str):
            _fail("WRONG_TYPE", "field 'unit' must be a string", iw)
        indicators.append(
            Indicator(id=_str(rec, "id", iw), name=_str(rec, "name", iw), kind=kind,
                      current_value=current, unit=unit)
        )

    targets = []
    for i, item in enumerate(_list(obj, "targets", where)):
        tw = f"project.targets[{i}]"
        rec = _obj(item, tw, required={"id", "name"}, optional=set())
        targets.append(TargetIndicator(id=_str(rec, "id", tw), name=_str(rec, "name", tw)))

    estimates = []
    for i, item in enumerate(_list(obj, "estimates", where)):
        ew = f"project.estimates[{i}]"
        rec = _obj(item, ew, required={"expert_id", "source", "sink", "value"}, optional=set())
        estimates.append(
            ImpactEstimate(
                expert_id=_str(rec, "expert_id", ew),
                source=_str(rec, "source", ew),
                sink=_str(rec, "sink", ew),
                value=_num(rec["value"], "value", ew),
            )
        )

    ranges = []
    for i, item in enumerate(_list(obj, "ranges", where)):
        rw = f"project.ranges[{i}]"
        rec = _obj(item, rw, required={"indicator_id"}, optional={"lo", "hi", "allowed"})
        allowed = rec.get("allowed")
        if allowed is not None:
            if not isinstance(allowed, list) or not all(isinstance(a, str) for a in allowed):
                _fail("WRONG_TYPE", "field 'allowed' must be an array of labels", rw)
            allowed = frozenset(allowed)
        lo = rec.get("lo")
        hi = rec.get("hi")
        ranges.append(
            PermittedRange(
                indicator_id=_str(rec, "indicator_id", rw),
                lo=None if lo is None else _num(lo, "lo", rw),
                hi=None if hi is None else _num(hi, "hi", rw),
                allowed=allowed,
            )
        )

    config = None
    if "criticality_config" in obj:
        cfg_obj = obj["criticality_config"]
        if not isinstance(cfg_obj, dict):
            _fail("WRONG_TYPE", "criticality_config must map target ids to thresholds", "project")
        thresholds = {}
        for tid, item in cfg_obj.items():
            cw = f"project.criticality_config[{tid}]"
            rec = _obj(item, cw, required={"critical", "significant", "moderate"}, optional=set())
            thresholds[tid] = CriticalityThresholds(
                critical=_num(rec["critical"], "critical", cw),
                significant=_num(rec["significant"], "significant", cw),
                moderate=_num(rec["moderate"], "moderate", cw),
            )
        config = CriticalityConfig(thresholds)

    policy = AggregationPolicy.MEAN
    if "aggregation_policy" in obj:
        policy = _enum(AggregationPolicy, obj["aggregation_policy"], "aggregation_policy", where)

    revision = 0
    if "revision" in obj:
        revision = _int(obj, "revision", where)

    project = Project(
        id=_str(obj, "id", where),
        profile=profile,
        indicators=tuple(indicators),
        targets=tuple(targets),
        estimates=tuple(estimates),
        ranges=tuple(ranges),
        criticality_config=config,
        aggregation_policy=policy,
        revision=revision,
    )
    require_valid(project)
    return project


def _parse_document(source) -> Any:
    if isinstance(source, (bytes, str)) and not _looks_like_path(source):
        text = source.decode("utf-8") if isinstance(source, bytes) else source
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise NotFoundError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _looks_like_path(source) -> bool:
    if isinstance(source, Path):
        return True
    if isinstance(source, str):
        stripped = source.lstrip()
        return not (stripped.startswith("{") or stripped.startswith("["))
    return False


def _check_envelope(doc: Any, payload_key: str) -> Any:
    envelope = _obj(doc, "file", required={"format_version", payload_key}, optional=set())
    version = envelope["format_version"]
    if version != FORMAT_VERSION:
        _fail("FORMAT_VERSION", f"unsupported format_version {version!r}", "file")
    return envelope[payload_key]


def load_project(source) -> Project:
    """Load and validate a project from a file path, raw JSON text or parsed dict."""
    doc = source if isinstance(source, dict) else _parse_document(source)
    return payload_to_project(_check_envelope(doc, "project"))


def save_project(project: Project, destination) -> Path:
    """Write the canonical project file; refuses to write an invalid project."""
    require_valid(project)
    payload = {"format_version": FORMAT_VERSION, "project": project_to_payload(project)}
    return _atomic_write(Path(destination), canonical_json(payload))


def document_to_payload(doc: DocumentRecord) -> dict:
    out: dict[str, Any] = {"kind": doc.kind.value, "title": doc.title}
    if doc.adopted_on is not None:
        out["adopted_on"] = doc.adopted_on.isoformat()
    return out


def load_portfolio(source) -> list[DocumentRecord]:
    doc = source if isinstance(source, dict) else _parse_document(source)
    items = _check_envelope(doc, "documents")
    if not isinstance(items, list):
        _fail("WRONG_TYPE", "'documents' must be an array", "file")
    records = []
    for i, item in enumerate(items):
        dw = f"documents[{i}]"
        rec = _obj(item, dw, required={"kind", "title"}, optional={"adopted_on"})
        adopted = rec.get("adopted_on")
        if adopted is not None:
            if not isinstance(adopted, str):
                _fail("WRONG_TYPE", "adopted_on must be an ISO date string", dw)
            try:
                adopted = date.fromisoformat(adopted)
            except ValueError:
                _fail("BAD_DATE", f"adopted_on {adopted!r} is not an ISO date", dw)
        title = _str(rec, "title", dw)
        if not title:
            _fail("EMPTY_TITLE", "a document record needs a nonempty title", dw)
        records.append(
            DocumentRecord(
                kind=_enum(DocumentKind, rec["kind"], "kind", dw),
                title=title,
                adopted_on=adopted,
            )
        )
    return records


def save_portfolio(documents: Iterable[DocumentRecord], destination) -> Path:
    payload = {
        "format_version": FORMAT_VERSION,
        "documents": [document_to_payload(d) for d in documents],
    }
    return _atomic_write(Path(destination), canonical_json(payload))


def _atomic_write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return path


# ---------------------------------------------------------------------------
# project store (one file per project; optimistic concurrency by revision)


class ProjectStore:
    """Directory of project files with revision-checked mutations.

    Mutations to a given project are serialized by a per-project lock;
    reads work on whatever canonical file is current (atomic replace means
    a read never sees a torn write).
    """

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def path_for(self, project_id: str) -> Path:
        if not project_id or "/" in project_id or project_id != Path(project_id).name:
            raise ValidationError(f"unusable project id {project_id!r}")
        return self.data_dir / f"{project_id}.json"

    def portfolio_path_for(self, project_id: str) -> Path:
        return self.data_dir / f"{project_id}.portfolio.json"

    def exists(self, project_id: str) -> bool:
        return self.path_for(project_id).is_file()

    def list_ids(self) -> list[str]:
        return sorted(
            p.name[: -len(".json")]
            for p in self.data_dir.glob("*.json")
            if not p.name.endswith(".portfolio.json")
        )

    def get(self, project_id: str) -> Project:
        path = self.path_for(project_id)
        if not path.is_file():
            raise NotFoundError(f"no project {project_id!r}")
        return load_project(path)

    def put(self, candidate: Project) -> Project:
        """Create or update; the candidate's revision must match the stored one.

        The stored revision always becomes candidate.revision + 1, so every
        successful mutation increments it by exactly one.
        """
        with self._lock_for(candidate.id):
            if self.exists(candidate.id):
                current = self.get(candidate.id)
                if candidate.revision != current.revision:
                    raise ConflictError(
                        f"stale revision {candidate.revision} for project {candidate.id!r} "
                        f"(current is {current.revision})",
                        expected_revision=current.revision,
                    )
            saved = replace(candidate, revision=candidate.revision + 1)
            save_project(saved, self.path_for(candidate.id))
            return saved

    def upsert_estimates(
        self, project_id: str, revision: int, estimates: Iterable[ImpactEstimate]
    ) -> Project:
        """Replace-or-add a batch of estimates keyed by (expert, source, sink)."""
        with self._lock_for(project_id):
            current = self.get(project_id)
            if revision != current.revision:
                raise ConflictError(
                    f"stale revision {revision} for project {project_id!r} "
                    f"(current is {current.revision})",
                    expected_revision=current.revision,
                )
            merged = {(e.expert_id, e.source, e.sink): e for e in current.estimates}
            for est in estimates:
                merged[(est.expert_id, est.source, est.sink)] = est
            updated = replace(
                current, estimates=tuple(merged.values()), revision=current.revision + 1
            )
            save_project(updated, self.path_for(project_id))
            return updated

    def portfolio_for(self, project_id: str) -> list[DocumentRecord]:
        path = self.portfolio_path_for(project_id)
        if not path.is_file():
            return []
        return load_portfolio(path)
