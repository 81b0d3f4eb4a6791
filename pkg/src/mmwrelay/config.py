"""Scenario configuration: YAML tree -> resolved evaluation points.

The schema is a fixed key-value tree; unknown keys are rejected with their
full path and every constraint violation is reported at once. Defaults
reproduce the published system tables (antenna gains 44 dB, B = 700 MHz,
N0 = -142 dBm/Hz, L = 50 m; Nakagami shapes 4/2 signal and 3/1 interference
LOS/NLOS, 7 interferers). Hop SNR comes either from an explicit snr_db or
through the link budget from power_dbm; the time correlation either
explicitly or through the Jakes model from the geometry.
"""

import copy
import math
from dataclasses import dataclass, field

import yaml

from mmwrelay import link
from mmwrelay.link import BlockageModel, CarrierProfile, HopGeometry, NakagamiProfile
from mmwrelay.mc import HopChannel
from mmwrelay.metrics import ModulationScheme, RelaySystem
from mmwrelay.sinr import HopParams


class ConfigError(ValueError):
    """Invalid scenario configuration; message lists every violation."""


SWEEP_VARIABLES = (
    "snr_db",
    "interferer_snr_db",
    "rho",
    "antennas",
    "delta_m",
    "power_dbm",
    "distance_m",
    "epsilon",
    "blocks",
    "threshold_db",
    "speed_mps",
)

METRICS = (
    "outage",
    "ser",
    "ser_asymptote",
    "capacity",
    "capacity_low",
    "capacity_high",
    "capacity_jensen",
    "outage_capacity",
    "e2e_cdf",
    "e2e_cdf_gaussian",
    "correlation",
    "doppler_hz",
    "coherence_half_us",
    "coherence_full_us",
)

_GEOMETRY_KEYS = {
    "distance_m": (float, "positive"),
    "speed_mps": (float, "non-negative"),
    "angle_rad": (float, None),
    "feedback_delay_s": (float, "non-negative"),
    "tx_gain_db": (float, None),
    "rx_gain_db": (float, None),
    "bandwidth_hz": (float, "positive"),
    "noise_density_dbm_hz": (float, None),
    "noise_figure_db": (float, None),
}

_HOP_KEYS = {
    "antennas": (int, "positive"),
    "rho": (float, "unit-interval-open"),
    "snr_db": (float, None),
    "power_dbm": (float, None),
    "interferers": (int, "non-negative"),
    "interference_snr_db": (float, None),
    "interference_offset_db": (float, None),
    **_GEOMETRY_KEYS,
}

_SCHEMA = {
    "carrier": {
        "frequency_ghz": (float, "positive"),
        "rain_los_db": (float, "non-negative"),
        "rain_nlos_db": (float, "non-negative"),
        "oxygen_db": (float, "non-negative"),
        "reference_distance_m": (float, "positive"),
    },
    "geometry": _GEOMETRY_KEYS,
    "nakagami": {
        "m_los": (float, "positive"),
        "m_nlos": (float, "positive"),
        "m_r_los": (float, "positive"),
        "m_r_nlos": (float, "positive"),
    },
    "hop1": _HOP_KEYS,
    "hop2": _HOP_KEYS,
    "blockage": {
        "kind": (str, ("exponential", "threepart")),
        "delta_m": (float, "positive"),
        "mixing": (str, ("los", "nlos", "average", "bernoulli")),
    },
    "modulation": (str, None),
    "snr_axis": (str, ("hop", "branch")),
    "sweep": {
        "variable": (str, SWEEP_VARIABLES),
        "start": (float, None),
        "stop": (float, None),
        "points": (int, None),
        "scale": (str, ("linear", "log")),
        "apply_to": (str, ("both", "hop1", "hop2")),
    },
    "series": None,  # list of {label, set}; validated separately
    "metrics": None,  # list of metric names
    "threshold_db": (float, None),
    "epsilon": (float, "unit-interval-open"),
    "blocks": (int, "positive"),
    "engines": (str, ("analytical", "mc", "both")),
    "mode": (str, ("published", "renormalized")),
    "trials": (int, "positive"),
    "master_seed": (int, "non-negative"),
    "workers": (int, "positive"),
    "output": (str, None),
}

DEFAULTS = {
    "carrier": {"frequency_ghz": 60.0, "reference_distance_m": 200.0},
    "geometry": {
        "distance_m": 50.0,
        "speed_mps": 10.0,
        "angle_rad": math.pi / 4,
        "feedback_delay_s": 2e-3,
        "tx_gain_db": 44.0,
        "rx_gain_db": 44.0,
        "bandwidth_hz": 700e6,
        "noise_density_dbm_hz": -142.0,
        "noise_figure_db": 0.0,
    },
    "nakagami": {"m_los": 4.0, "m_nlos": 2.0, "m_r_los": 3.0, "m_r_nlos": 1.0},
    "hop1": {"antennas": 5, "interferers": 7, "interference_snr_db": 0.0, "power_dbm": 30.0},
    "hop2": {"antennas": 5, "interferers": 7, "interference_snr_db": 0.0, "power_dbm": 30.0},
    "blockage": {"kind": "exponential", "delta_m": 200.0, "mixing": "los"},
    "modulation": "bpsk",
    "snr_axis": "hop",
    "sweep": {"variable": "snr_db", "start": 0.0, "stop": 40.0, "points": 21,
              "scale": "linear", "apply_to": "both"},
    "series": [],
    "metrics": ["outage", "ser", "capacity"],
    "threshold_db": 0.0,
    "epsilon": 0.01,
    "blocks": 1,
    "engines": "analytical",
    "mode": "published",
    "trials": 1_000_000,
    "master_seed": 1,
    "workers": 1,
    "output": "sweep.csv",
}


def _check_leaf(path, value, spec, errors):
    typ, constraint = spec
    if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        value = float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{path}: expected integer, got {value!r}")
            return value
    elif not isinstance(value, typ):
        errors.append(f"{path}: expected {typ.__name__}, got {value!r}")
        return value
    if constraint == "positive" and value <= 0:
        errors.append(f"{path}: must be positive, got {value}")
    elif constraint == "non-negative" and value < 0:
        errors.append(f"{path}: must be non-negative, got {value}")
    elif constraint == "unit-interval-open" and not (0.0 <= value < 1.0):
        errors.append(f"{path}: must lie in [0, 1), got {value}")
    elif isinstance(constraint, tuple) and value not in constraint:
        errors.append(f"{path}: must be one of {constraint}, got {value!r}")
    return value


def _merge_tree(raw, schema, defaults, path, errors):
    out = copy.deepcopy(defaults) if isinstance(defaults, dict) else {}
    if raw is None:
        return out
    if not isinstance(raw, dict):
        errors.append(f"{path or 'top level'}: expected mapping, got {raw!r}")
        return out
    for key, value in raw.items():
        here = f"{path}.{key}" if path else key
        if key not in schema:
            errors.append(f"{here}: unknown key")
            continue
        spec = schema[key]
        if isinstance(spec, dict):
            out[key] = _merge_tree(value, spec, defaults.get(key, {}), here, errors)
        elif spec is None:
            out[key] = value
        else:
            if value is None:
                out[key] = None
            else:
                out[key] = _check_leaf(here, value, spec, errors)
    return out


def _validate_lists(cfg, errors):
    metrics = cfg.get("metrics")
    if not isinstance(metrics, list):
        errors.append("metrics: expected a list")
    else:
        for m in metrics:
            if m not in METRICS:
                errors.append(f"metrics: unknown metric {m!r}")
    series = cfg.get("series")
    if not isinstance(series, list):
        errors.append("series: expected a list")
    else:
        for i, entry in enumerate(series):
            if not isinstance(entry, dict) or set(entry) - {"label", "set"}:
                errors.append(f"series[{i}]: entries need exactly 'label' and 'set'")
                continue
            if "label" not in entry or not isinstance(entry["label"], str):
                errors.append(f"series[{i}]: missing string 'label'")
            for dotted in entry.get("set", {}):
                node = _SCHEMA
                for part in dotted.split("."):
                    if isinstance(node, dict) and part in node:
                        node = node[part]
                    else:
                        errors.append(f"series[{i}].set: unknown path {dotted!r}")
                        break
    sweep = cfg.get("sweep", {})
    if isinstance(sweep.get("points"), int) and sweep["points"] < 2:
        errors.append("sweep.points: must be at least 2")
    if sweep.get("scale") == "log" and (sweep.get("start", 1.0) <= 0 or sweep.get("stop", 1.0) <= 0):
        errors.append("sweep: log scale requires positive start/stop")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario; `raw` is the merged tree with defaults."""

    raw: dict = field(repr=False)

    @classmethod
    def from_dict(cls, data):
        errors = []
        merged = _merge_tree(data or {}, _SCHEMA, DEFAULTS, "", errors)
        _validate_lists(merged, errors)
        try:
            ModulationScheme.parse(merged.get("modulation", "bpsk"))
        except (ValueError, TypeError) as exc:
            errors.append(f"modulation: {exc}")
        if errors:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
        return cls(raw=merged)

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = yaml.safe_load(fh)
            except yaml.YAMLError as exc:
                raise ConfigError(f"cannot parse {path}: {exc}") from None
        return cls.from_dict(data)

    def with_overrides(self, dotted):
        """New config with dotted-path overrides applied to the raw tree."""
        data = copy.deepcopy(self.raw)
        for path, value in dotted.items():
            node = data
            parts = path.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = value
        return ScenarioConfig.from_dict(data)

    def __getitem__(self, key):
        return self.raw[key]

    # ---- resolution -------------------------------------------------------

    def carrier_profile(self):
        c = self.raw["carrier"]
        overrides = {
            k: c.get(src)
            for k, src in (
                ("alpha_rain_los", "rain_los_db"),
                ("alpha_rain_nlos", "rain_nlos_db"),
                ("alpha_ox", "oxygen_db"),
            )
            if c.get(src) is not None
        }
        f_ghz = c["frequency_ghz"]
        try:
            base = link.carrier_profile(f_ghz)
        except KeyError:
            missing = {"alpha_rain_los", "alpha_rain_nlos", "alpha_ox"} - set(overrides)
            if missing:
                raise ConfigError(
                    f"carrier {f_ghz} GHz is not in the built-in table; "
                    f"override {sorted(missing)}"
                ) from None
            base = CarrierProfile(f_ghz * 1e9, 0.0, 0.0, 0.0, c["reference_distance_m"])
        return CarrierProfile(
            f_c=f_ghz * 1e9,
            alpha_rain_los=overrides.get("alpha_rain_los", base.alpha_rain_los),
            alpha_rain_nlos=overrides.get("alpha_rain_nlos", base.alpha_rain_nlos),
            alpha_ox=overrides.get("alpha_ox", base.alpha_ox),
            reference_distance=c["reference_distance_m"],
        )

    def hop_geometry(self, hop):
        merged = dict(self.raw["geometry"])
        merged.update({k: v for k, v in self.raw[hop].items() if k in _GEOMETRY_KEYS and v is not None})
        return HopGeometry(
            distance=merged["distance_m"],
            speed=merged["speed_mps"],
            angle=merged["angle_rad"],
            feedback_delay=merged["feedback_delay_s"],
            tx_gain_db=merged["tx_gain_db"],
            rx_gain_db=merged["rx_gain_db"],
            bandwidth=merged["bandwidth_hz"],
            noise_density_dbm=merged["noise_density_dbm_hz"],
            noise_figure_db=merged["noise_figure_db"],
        )

    def blockage_model(self):
        b = self.raw["blockage"]
        return BlockageModel(kind=b["kind"], delta=b["delta_m"])

    def nakagami(self):
        n = self.raw["nakagami"]
        return NakagamiProfile(
            m_los=n["m_los"], m_nlos=n["m_nlos"], m_r_los=n["m_r_los"], m_r_nlos=n["m_r_nlos"]
        )

    def modulation(self):
        return ModulationScheme.parse(self.raw["modulation"])

    def sweep_values(self):
        import numpy as np

        s = self.raw["sweep"]
        if s["scale"] == "log":
            vals = np.geomspace(s["start"], s["stop"], s["points"])
        else:
            vals = np.linspace(s["start"], s["stop"], s["points"])
        return [float(v) for v in vals]

    def _hop_state(self, hop, los, sweep_var=None, sweep_value=None):
        """HopParams for one hop in one blockage state at one sweep point."""
        cfg = dict(self.raw[hop])
        sweep = self.raw["sweep"]
        applies = sweep["apply_to"] in ("both", hop)
        if sweep_var is not None and applies and sweep_var in _HOP_KEYS:
            cfg[sweep_var] = int(sweep_value) if sweep_var == "antennas" else sweep_value
        geom = self.hop_geometry(hop)
        if sweep_var == "distance_m" and applies:
            geom = geom.with_(distance=sweep_value)
        if sweep_var == "speed_mps" and applies:
            geom = geom.with_(speed=sweep_value)
        profile = self.carrier_profile()
        nak = self.nakagami()

        antennas = int(cfg["antennas"])
        m = nak.m_los if los else nak.m_nlos
        m_r = nak.m_r_los if los else nak.m_r_nlos

        rho = cfg.get("rho")
        if rho is None:
            rho = link.jakes_correlation(geom, profile.f_c)

        snr_db = cfg.get("snr_db")
        if snr_db is not None:
            snr = link.db_to_linear(snr_db)
            if not los:
                # direct-SNR configs apply the LOS/NLOS rain differential
                delta = (profile.alpha_rain_nlos - profile.alpha_rain_los) / profile.reference_distance
                snr = link.db_to_linear(snr_db - delta * geom.distance)
        else:
            power = cfg.get("power_dbm")
            if power is None:
                raise ConfigError(f"{hop}: set snr_db or power_dbm")
            snr = link.average_snr(power, geom, profile, los=los)
        if self.raw["snr_axis"] == "branch":
            snr *= antennas

        interferers = int(cfg["interferers"])
        offs = cfg.get("interference_offset_db")
        if offs is not None:
            isnr = snr * link.db_to_linear(offs)
        else:
            isnr = link.db_to_linear(cfg.get("interference_snr_db", 0.0))
        return HopParams(
            antennas=antennas,
            m=m,
            rho=float(rho),
            snr=float(snr),
            interferers=interferers,
            m_r=m_r,
            interference_snr=float(isnr),
        )

    def hop_channel(self, hop, sweep_var=None, sweep_value=None):
        """HopChannel (with blockage mixing) at one sweep point."""
        mixing = self.raw["blockage"]["mixing"]
        state = lambda los: self._hop_state(hop, los, sweep_var, sweep_value)
        if mixing == "los":
            return HopChannel(los=state(True))
        if mixing == "nlos":
            return HopChannel(los=state(True), nlos=state(False), p_los=0.0)
        model = self.blockage_model()
        if sweep_var == "delta_m" and self.raw["sweep"]["apply_to"] in ("both", hop):
            model = BlockageModel(kind=model.kind, delta=sweep_value)
        geom = self.hop_geometry(hop)
        d = sweep_value if sweep_var == "distance_m" else geom.distance
        p_los = link.los_probability(model, d)
        return HopChannel(los=state(True), nlos=state(False), p_los=p_los)

    def system_at(self, sweep_var=None, sweep_value=None):
        """RelaySystem plus metric-level knobs at one sweep point."""
        h1 = self.hop_channel("hop1", sweep_var, sweep_value)
        h2 = self.hop_channel("hop2", sweep_var, sweep_value)
        bandwidth = self.hop_geometry("hop1").bandwidth
        system = RelaySystem(h1, h2, bandwidth=bandwidth, mode=self.raw["mode"])
        threshold = link.db_to_linear(
            sweep_value if sweep_var == "threshold_db" else self.raw["threshold_db"]
        )
        epsilon = sweep_value if sweep_var == "epsilon" else self.raw["epsilon"]
        blocks = int(sweep_value) if sweep_var == "blocks" else self.raw["blocks"]
        return system, threshold, float(epsilon), blocks
