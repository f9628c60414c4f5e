"""Scenario files: YAML documents validated against a fixed schema.

Grammar (every key optional unless noted)::

    seed: <int >= 0>                  # required
    experiment: <name>                # if given, must match the command
    carrier_hz: 2.6e9
    transmit_power_dbm: <float>       # default depends on the experiment
    noise_power_dbm: -90
    amp_noise_power_dbm: -70
    path_loss: {beta0_db: -30, bs_irs: 2.2, irs_user: 2.8, direct: 3.5, inter_irs: 2.2}
    fading: {k_factor: .inf, realizations: 1}
    include_direct: false
    nodes:                            # list of
      - {id: <str>, role: bs|user|irs, position: [x, y] or [x, y, z],
         antennas: 1, axis: [1, 0, 0], spacing_wavelengths: 0.5,
         elements: <int>, kind: passive|active|hybrid, amp_budget_dbm: null,
         constraint: total|per_element, n_active: null}
    obstacles:                        # list of
      - {box: [x_min, x_max, y_min, y_max]}
      - {wall: [[x0, y0], [x1, y1]]}
    <experiment>: {...}               # per-experiment knobs, see EXPERIMENT_FIELDS

``elements`` is required for IRS nodes and meaningless otherwise. Missing
values are filled from the defaults and :func:`dump_scenario` writes the
completed document back out.
"""

import hashlib
import math
from dataclasses import dataclass, field

import yaml

EXPERIMENTS = ("fig2", "fig3", "fig4", "placement", "coverage", "routing", "fieldtrial")

DEFAULT_TRANSMIT_DBM = {
    "fig2": 30.0, "fig3": 0.0, "fig4": 10.0, "placement": 40.0,
    "coverage": 30.0, "routing": 10.0, "fieldtrial": 0.0,
}


class ScenarioError(ValueError):
    """Schema violation, with the offending field and source line."""

    def __init__(self, message, field_path="", line=None, source="<scenario>"):
        where = source if line is None else f"{source}:{line}"
        prefix = f"{where}: " + (f"field '{field_path}': " if field_path else "")
        super().__init__(prefix + message)
        self.field_path, self.line = field_path, line


# ---------------------------------------------------------------------------
# YAML with line numbers
# ---------------------------------------------------------------------------

class _Located:
    """A parsed value plus the line it came from."""

    __slots__ = ("value", "line")

    def __init__(self, value, line):
        self.value, self.line = value, line


def _construct(node, loader):
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = loader.construct_object(k)
            if not isinstance(key, str):
                raise ScenarioError(f"mapping keys must be strings, got {key!r}", line=k.start_mark.line + 1)
            if key in out:
                raise ScenarioError(f"duplicate key '{key}'", line=k.start_mark.line + 1)
            out[key] = _construct(v, loader)
        return _Located(out, line)
    if isinstance(node, yaml.SequenceNode):
        return _Located([_construct(v, loader) for v in node.value], line)
    return _Located(loader.construct_object(node), line)


def _load(text, source):
    try:
        loader = yaml.SafeLoader(text)
        try:
            root = loader.get_single_node()
            return None if root is None else _construct(root, loader)
        finally:
            loader.dispose()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                            line=None if mark is None else mark.line + 1, source=source) from None


def _plain(loc):
    v = loc.value
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_plain(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# field checkers
# ---------------------------------------------------------------------------

class _Ctx:
    def __init__(self, source):
        self.source = source

    def fail(self, msg, path, loc):
        raise ScenarioError(msg, path, None if loc is None else loc.line, self.source)


def _num(ctx, loc, path, *, integer=False, minimum=None, strict=False, allow_inf=False):
    v = loc.value
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        ctx.fail(f"expected a number, got {v!r}", path, loc)
    if integer and (isinstance(v, float) and not v.is_integer()):
        ctx.fail(f"expected an integer, got {v!r}", path, loc)
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        ctx.fail("must be finite", path, loc)
    if minimum is not None and (v < minimum or (strict and v == minimum)):
        ctx.fail(f"must be {'>' if strict else '>='} {minimum}, got {v}", path, loc)
    return int(v) if integer else float(v)


def _bool(ctx, loc, path):
    if not isinstance(loc.value, bool):
        ctx.fail(f"expected true/false, got {loc.value!r}", path, loc)
    return loc.value


def _str(ctx, loc, path, choices=None):
    if not isinstance(loc.value, str) or not loc.value:
        ctx.fail(f"expected a non-empty string, got {loc.value!r}", path, loc)
    if choices is not None and loc.value not in choices:
        ctx.fail(f"must be one of {list(choices)}, got {loc.value!r}", path, loc)
    return loc.value


def _list(ctx, loc, path, item, *, length=None, min_length=0):
    if not isinstance(loc.value, list):
        ctx.fail(f"expected a list, got {loc.value!r}", path, loc)
    if length is not None and len(loc.value) not in (length if isinstance(length, tuple) else (length,)):
        ctx.fail(f"expected {length} entries, got {len(loc.value)}", path, loc)
    if len(loc.value) < min_length:
        ctx.fail(f"expected at least {min_length} entries", path, loc)
    return [item(ctx, x, f"{path}[{i}]") for i, x in enumerate(loc.value)]


def _float(**kw):
    return lambda ctx, loc, path: _num(ctx, loc, path, **kw)


def _int(**kw):
    return lambda ctx, loc, path: _num(ctx, loc, path, integer=True, **kw)


def _floats(length=None, min_length=0, **kw):
    return lambda ctx, loc, path: _list(ctx, loc, path, _float(**kw), length=length,
                                        min_length=min_length)


def _ints(min_length=1, **kw):
    return lambda ctx, loc, path: _list(ctx, loc, path, _int(**kw), min_length=min_length)


def _optional(check):
    return lambda ctx, loc, path: None if loc.value is None else check(ctx, loc, path)


def _choice(*choices):
    return lambda ctx, loc, path: _str(ctx, loc, path, choices)


def _range(ctx, loc, path):
    lo, hi = _floats(length=2)(ctx, loc, path)
    if hi < lo:
        ctx.fail("range upper bound is below the lower bound", path, loc)
    return [lo, hi]


def _position(ctx, loc, path):
    p = _floats(length=(2, 3))(ctx, loc, path)
    if len(p) == 2:
        p.append(0.0)
    if p[2] < 0:
        ctx.fail("z must be >= 0", path, loc)
    return p


def _axis(ctx, loc, path):
    a = _floats(length=3)(ctx, loc, path)
    norm = math.sqrt(sum(v * v for v in a))
    if norm == 0:
        ctx.fail("axis must be non-zero", path, loc)
    return [v / norm for v in a]


def _mapping(ctx, loc, path, fields):
    """Validate a mapping against ``{key: (checker, default)}``; unknown keys are errors.
    A default of ``REQUIRED`` makes the key mandatory."""
    if loc is None:
        loc = _Located({}, None)
    if not isinstance(loc.value, dict):
        ctx.fail(f"expected a mapping, got {loc.value!r}", path, loc)
    out = {}
    for key, sub in loc.value.items():
        if key not in fields:
            ctx.fail(f"unknown key '{key}' (allowed: {', '.join(fields)})",
                     f"{path}.{key}" if path else key, sub)
    for key, (check, default) in fields.items():
        kpath = f"{path}.{key}" if path else key
        if key in loc.value:
            out[key] = check(ctx, loc.value[key], kpath)
        elif default is REQUIRED:
            ctx.fail("required key is missing", kpath, loc)
        else:
            out[key] = default() if callable(default) else default
    return out


REQUIRED = object()


def _submapping(fields):
    return lambda ctx, loc, path: _mapping(ctx, loc, path, fields)


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

PATH_LOSS_FIELDS = {
    "beta0_db": (_float(), -30.0),
    "bs_irs": (_float(minimum=2.0), 2.2),
    "irs_user": (_float(minimum=2.0), 2.8),
    "direct": (_float(minimum=2.0), 3.5),
    "inter_irs": (_float(minimum=2.0), 2.2),
}

FADING_FIELDS = {
    "k_factor": (_float(minimum=0.0, allow_inf=True), math.inf),
    "realizations": (_int(minimum=1), 1),
}

NODE_FIELDS = {
    "id": (lambda c, l, p: _str(c, l, p), REQUIRED),
    "role": (_choice("bs", "user", "irs"), REQUIRED),
    "position": (_position, REQUIRED),
    "antennas": (_int(minimum=1), 1),
    "axis": (_axis, lambda: [1.0, 0.0, 0.0]),
    "spacing_wavelengths": (_float(minimum=0.0, strict=True), 0.5),
    "elements": (_optional(_int(minimum=1)), None),
    "kind": (_choice("passive", "active", "hybrid"), "passive"),
    "amp_budget_dbm": (_optional(_float()), None),
    "constraint": (_choice("total", "per_element"), "total"),
    "n_active": (_optional(_int(minimum=0)), None),
}


def _area_fields():
    return {
        "x_range": (_range, lambda: [50.0, 70.0]),
        "y_range": (_range, lambda: [-1.0, 1.0]),
        "nx": (_int(minimum=1), 21),
        "ny": (_int(minimum=1), 21),
    }


def _heatmap_fields():
    return {
        "x_range": (_optional(_range), None),
        "y_range": (_range, lambda: [-5.0, 5.0]),
        "resolution": (_float(minimum=0.0, strict=True), 1.0),
    }


EXPERIMENT_FIELDS = {
    "fig2": {
        "p_t_dbm": (_floats(min_length=1), lambda: [float(v) for v in range(-30, 45, 5)]),
        "panel_counts": (_ints(minimum=1), lambda: [1, 2, 4]),
        "total_elements": (_int(minimum=1), 256),
        "units": (_int(minimum=1), 16),
    },
    "fig3": {
        "n_values": (_ints(minimum=1), lambda: [8, 16, 32, 64, 128, 256, 512]),
        "bs_offset": (_float(minimum=0.0, strict=True), 2.0),
        "user_offset": (_float(minimum=0.0, strict=True), 2.0),
        "panel_axis": (_axis, lambda: [0.0, 1.0, 0.0]),
    },
    "fig4": {
        "n_values": (_ints(minimum=2), lambda: [16, 32, 64, 128, 256, 512]),
        "amp_budget_dbm": (_float(), 10.0),
        "constraint": (_choice("total", "per_element"), "total"),
        "panel_y": (_float(), 2.0),
        "x_candidates": (_optional(_floats(min_length=2)), None),
        "fractions": (_ints(minimum=1), lambda: list(range(1, 16))),
    },
    "placement": {
        "resolution": (_float(minimum=0.0, strict=True), 0.5),
        "refinement_levels": (_int(minimum=0), 2),
        "standoff": (_float(minimum=0.0), 1.0),
        "n_active_values": (_optional(_ints(minimum=0)), None),
        "heatmap": (_submapping(_heatmap_fields()), lambda: _defaults(_heatmap_fields())),
    },
    "coverage": {
        "n_values": (_ints(minimum=1), lambda: [16, 32, 64, 128, 256]),
        "area": (_submapping(_area_fields()), lambda: _defaults(_area_fields())),
        "bs_side": (_position, lambda: [2.0, 0.0, 0.0]),
        "user_side": (_position, lambda: [48.0, 0.0, 0.0]),
        "bs_counts": (_ints(minimum=1), lambda: [1, 2, 4, 8]),
        "dmimo_radius": (_float(minimum=0.0, strict=True), 2.0),
        "dmimo_half_angle": (_float(minimum=0.0), 0.6),
        "panel_axis": (_axis, lambda: [0.0, 1.0, 0.0]),
    },
    "routing": {
        "max_hops": (_int(minimum=0), 3),
        "fast": (_bool, False),
    },
    "fieldtrial": {
        "log": (_optional(lambda c, l, p: _str(c, l, p)), None),
        "samples_per_location": (_int(minimum=1), 200),
        "median_off_dbm": (_float(), -100.0),
        "threshold_dbm": (_float(), -100.0),
        "include_two_user_trial": (_bool, True),
    },
}


def _defaults(fields):
    return {k: (d() if callable(d) else d) for k, (_, d) in fields.items() if d is not REQUIRED}


def _obstacle(ctx, loc, path):
    if not isinstance(loc.value, dict) or len(loc.value) != 1:
        ctx.fail("obstacle must be {box: [...]} or {wall: [[x, y], [x, y]]}", path, loc)
    (kind, sub), = loc.value.items()
    if kind == "box":
        x0, x1, y0, y1 = _floats(length=4)(ctx, sub, f"{path}.box")
        if x1 < x0 or y1 < y0:
            ctx.fail("box bounds are inverted", f"{path}.box", sub)
        return {"box": [x0, x1, y0, y1]}
    if kind == "wall":
        ends = _list(ctx, sub, f"{path}.wall", _floats(length=2), length=2)
        return {"wall": ends}
    ctx.fail(f"unknown obstacle type '{kind}'", path, loc)


def _node(ctx, loc, path):
    n = _mapping(ctx, loc, path, NODE_FIELDS)
    if n["role"] == "irs" and n["elements"] is None:
        ctx.fail("IRS nodes need 'elements'", f"{path}.elements", loc)
    if n["role"] != "irs":
        for key in ("elements", "n_active", "amp_budget_dbm"):
            if n[key] is not None:
                ctx.fail(f"'{key}' only applies to IRS nodes", f"{path}.{key}", loc.value[key])
    if n["role"] == "irs" and n["kind"] == "hybrid":
        if n["n_active"] is None or n["n_active"] > n["elements"]:
            ctx.fail("hybrid IRS needs 0 <= n_active <= elements", f"{path}.n_active", loc)
    return n


TOP_FIELDS = {
    "seed": (_int(minimum=0), REQUIRED),
    "experiment": (_optional(_choice(*EXPERIMENTS)), None),
    "carrier_hz": (_float(minimum=0.0, strict=True), 2.6e9),
    "transmit_power_dbm": (_optional(_float()), None),
    "noise_power_dbm": (_float(), -90.0),
    "amp_noise_power_dbm": (_float(), -70.0),
    "path_loss": (_submapping(PATH_LOSS_FIELDS), lambda: _defaults(PATH_LOSS_FIELDS)),
    "fading": (_submapping(FADING_FIELDS), lambda: _defaults(FADING_FIELDS)),
    "include_direct": (_bool, False),
    "nodes": (lambda c, l, p: _list(c, l, p, _node), list),
    "obstacles": (lambda c, l, p: _list(c, l, p, _obstacle), list),
}
TOP_FIELDS.update({name: (_optional(_submapping(f)), None) for name, f in EXPERIMENT_FIELDS.items()})


@dataclass
class Scenario:
    """A validated, default-completed scenario document."""

    data: dict
    source: str = field(default="<scenario>", compare=False)

    def __getitem__(self, key):
        return self.data[key]

    @property
    def seed(self):
        return self.data["seed"]

    def with_seed(self, seed):
        d = dict(self.data)
        d["seed"] = int(seed)
        return Scenario(d, self.source)

    def nodes(self, role=None):
        return [n for n in self.data["nodes"] if role is None or n["role"] == role]

    def params(self, experiment):
        """Experiment knobs with defaults filled for absent blocks."""
        block = self.data.get(experiment)
        return block if block is not None else _defaults(EXPERIMENT_FIELDS[experiment])

    def transmit_power_dbm(self, experiment):
        p = self.data["transmit_power_dbm"]
        return DEFAULT_TRANSMIT_DBM[experiment] if p is None else p

    def digest(self):
        """SHA-256 of the normalized dump."""
        return hashlib.sha256(dump_scenario(self).encode()).hexdigest()


def _validate(root, source):
    ctx = _Ctx(source)
    if root is None:
        raise ScenarioError("empty scenario", "seed", None, source)
    data = _mapping(ctx, root, "", TOP_FIELDS)
    ids = [n["id"] for n in data["nodes"]]
    for i, nid in enumerate(ids):
        if ids.index(nid) != i:
            raise ScenarioError(f"duplicate node id '{nid}'", f"nodes[{i}].id",
                                root.value["nodes"].value[i].line, source)
    positions = [tuple(n["position"]) for n in data["nodes"]]
    for i, p in enumerate(positions):
        if positions.index(p) != i:
            raise ScenarioError(f"node '{ids[i]}' shares its position with '{ids[positions.index(p)]}'",
                                f"nodes[{i}].position", root.value["nodes"].value[i].line, source)
    return data


def parse_scenario_text(text, source="<scenario>"):
    return Scenario(_validate(_load(text, source), source), source)


def parse_scenario(path):
    """Read and validate a scenario file."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", source=str(path)) from None
    return parse_scenario_text(text, str(path))


def dump_scenario(scenario):
    """Normalized YAML text; parsing it again gives an equal Scenario."""
    data = {k: v for k, v in scenario.data.items() if not (k in EXPERIMENT_FIELDS and v is None)}
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)
