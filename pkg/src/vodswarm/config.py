"""Scenario/setting/profile presets, derived quantities, and INI round-trip."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

KB = 1024
MB = 1024 * KB

PROTOCOLS = ("sisp", "eisp", "rarest")


@dataclass(frozen=True)
class Setting:
    """Unchoke-slot configuration (regular slots, optimistic slots, cadence)."""

    name: str
    x1: int
    x2: int
    k: int
    delta: float = 10.0


@dataclass(frozen=True)
class Profile:
    """Interactivity profile: event rate, segment fractions, action probabilities.

    Probabilities are (play, pause, jump_backward, jump_forward). Segment
    fractions are of file size; pause length uses pause_frac * f_size / r_down.
    """

    name: str
    event_rate: float
    play_frac: float
    jump_frac: float
    pause_frac: float
    probs: tuple[float, float, float, float]


SETTINGS = {
    "su1": Setting("su1", x1=3, x2=1, k=3),
    "su2": Setting("su2", x1=4, x2=1, k=3),
    "su3": Setting("su3", x1=2, x2=2, k=4),
}

PROFILES = {
    "li": Profile("li", 0.005, 0.145, 0.145, 0.145, (0.89, 0.01, 0.05, 0.05)),
    "mi": Profile("mi", 0.014, 0.035, 0.035, 0.035, (0.71, 0.05, 0.12, 0.12)),
    "hi": Profile("hi", 0.025, 0.015, 0.015, 0.015, (0.55, 0.15, 0.15, 0.15)),
}

# (file size bytes, default leecher population)
SCENARIOS = {
    "all_media": (20 * MB, 7),
    "music": (10 * MB, 10),
    "tv": (100 * MB, 15),
    "movies": (200 * MB, 25),
}


def frac_to_pieces(frac: float, t: int) -> int:
    """Convert a file-size fraction to whole pieces: round half up, floor 1."""
    return max(1, int(frac * t + 0.5))


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully-resolved run configuration; every run is a pure function of this plus a seed."""

    scenario: str
    f_size: int
    s_size: int
    seeds: int = 1
    r_up: float = 20 * KB
    r_down: float = 20 * KB
    r_play: float = 20 * KB
    p_size: int = 256 * KB
    b_size: int = 16 * KB
    setting: Setting = field(default_factory=lambda: SETTINGS["su1"])
    profile: Profile | None = field(default_factory=lambda: PROFILES["mi"])
    protocol: str = "eisp"
    sim_time: float = 1.0e6
    runs: int = 10
    master_seed: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.p_size % self.b_size != 0:
            raise ValueError("block size must divide piece size")
        if self.f_size % self.p_size != 0:
            raise ValueError("piece size must divide file size")
        if self.s_size < 1 or self.seeds < 1:
            raise ValueError("population requires at least one leecher and one seed")
        if min(self.r_up, self.r_down, self.r_play) <= 0:
            raise ValueError("rates must be positive")
        st = self.setting
        if not (st.x1 >= st.x2 >= 1):
            raise ValueError("slot counts must satisfy x1 >= x2 >= 1")
        if st.delta <= 0 or st.k < 1:
            raise ValueError("bad unchoke cadence")
        if self.sim_time <= 0 or self.runs < 1:
            raise ValueError("bad run parameters")
        if self.profile is None and self.protocol != "rarest":
            raise ValueError("window policies need an interactivity profile; use protocol=rarest")
        if self.profile is not None:
            pr = self.profile
            if abs(sum(pr.probs) - 1.0) > 1e-9:
                raise ValueError("action probabilities must sum to 1")
            if pr.event_rate <= 0:
                raise ValueError("event rate must be positive")
            if not (0 < pr.play_frac <= 1 and 0 < pr.jump_frac <= 1 and 0 < pr.pause_frac <= 1):
                raise ValueError("segment fractions must lie in (0, 1]")

    # -- derived quantities ------------------------------------------------

    @property
    def t(self) -> int:
        """Pieces in the file."""
        return self.f_size // self.p_size

    @property
    def blocks_per_piece(self) -> int:
        return self.p_size // self.b_size

    @property
    def play_pieces(self) -> int:
        if self.profile is None:
            raise ValueError("no interactivity profile configured")
        return frac_to_pieces(self.profile.play_frac, self.t)

    @property
    def jump_pieces(self) -> int:
        if self.profile is None:
            raise ValueError("no interactivity profile configured")
        return frac_to_pieces(self.profile.jump_frac, self.t)

    @property
    def pause_seconds(self) -> float:
        if self.profile is None:
            raise ValueError("no interactivity profile configured")
        return self.profile.pause_frac * self.f_size / self.r_down

    @property
    def window_pieces(self) -> int:
        """Sliding-window width w (= play segment in pieces)."""
        return self.play_pieces

    @property
    def urgency_pieces(self) -> int:
        """Urgency threshold v = ceil(w / 2)."""
        return (self.window_pieces + 1) // 2

    @property
    def piece_seconds(self) -> float:
        """Playback wall time of one piece."""
        return self.p_size / self.r_play

    @property
    def download_floor(self) -> float:
        """Lower bound on session duration: file at full download rate."""
        return self.f_size / self.r_down


def build_config(
    scenario: str = "movies",
    setting: str = "su1",
    profile: str | None = "mi",
    protocol: str = "eisp",
    s_size: int | None = None,
    sim_time: float = 1.0e6,
    runs: int = 10,
    master_seed: int = 1,
) -> ScenarioConfig:
    """Resolve preset names into a full configuration."""
    try:
        f_size, default_s = SCENARIOS[scenario]
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}") from None
    try:
        st = SETTINGS[setting]
    except KeyError:
        raise ValueError(f"unknown setting {setting!r}") from None
    if profile is None or profile == "off":
        pr = None
    else:
        try:
            pr = PROFILES[profile]
        except KeyError:
            raise ValueError(f"unknown profile {profile!r}") from None
    return ScenarioConfig(
        scenario=scenario,
        f_size=f_size,
        s_size=s_size if s_size is not None else default_s,
        setting=st,
        profile=pr,
        protocol=protocol,
        sim_time=sim_time,
        runs=runs,
        master_seed=master_seed,
    )


def with_overrides(cfg: ScenarioConfig, **kw) -> ScenarioConfig:
    return replace(cfg, **kw)


# -- INI round-trip ---------------------------------------------------------


def _num(x: float) -> str:
    """Canonical numeric text: integral values drop the trailing .0."""
    xf = float(x)
    return str(int(xf)) if xf.is_integer() else repr(xf)


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialize a resolved configuration; load_config(dump_config(c)) == c."""
    cp = configparser.ConfigParser()
    cp["scenario"] = {
        "name": cfg.scenario,
        "f_size_bytes": str(cfg.f_size),
        "s_size": str(cfg.s_size),
        "seeds": str(cfg.seeds),
        "r_up_bytes_s": _num(cfg.r_up),
        "r_down_bytes_s": _num(cfg.r_down),
        "r_play_bytes_s": _num(cfg.r_play),
        "p_size_bytes": str(cfg.p_size),
        "b_size_bytes": str(cfg.b_size),
    }
    cp["setting"] = {
        "name": cfg.setting.name,
        "x1": str(cfg.setting.x1),
        "x2": str(cfg.setting.x2),
        "k": str(cfg.setting.k),
        "delta": _num(cfg.setting.delta),
    }
    if cfg.profile is None:
        cp["profile"] = {"name": "off"}
    else:
        pr = cfg.profile
        cp["profile"] = {
            "name": pr.name,
            "event_rate_per_s": _num(pr.event_rate),
            "play_frac": _num(pr.play_frac),
            "jump_frac": _num(pr.jump_frac),
            "pause_frac": _num(pr.pause_frac),
            "p_play": _num(pr.probs[0]),
            "p_pause": _num(pr.probs[1]),
            "p_jump_backward": _num(pr.probs[2]),
            "p_jump_forward": _num(pr.probs[3]),
        }
    cp["run"] = {
        "protocol": cfg.protocol,
        "sim_time": _num(cfg.sim_time),
        "runs": str(cfg.runs),
        "master_seed": str(cfg.master_seed),
    }
    derived: dict[str, str] = {
        "t_pieces": str(cfg.t),
        "blocks_per_piece": str(cfg.blocks_per_piece),
    }
    if cfg.profile is not None:
        derived.update(
            {
                "window_pieces": str(cfg.window_pieces),
                "urgency_pieces": str(cfg.urgency_pieces),
                "play_pieces": str(cfg.play_pieces),
                "jump_pieces": str(cfg.jump_pieces),
                "pause_seconds": _num(cfg.pause_seconds),
                "piece_seconds": _num(cfg.piece_seconds),
            }
        )
    # informational only; the loader recomputes all derived values
    cp["derived"] = derived
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load_config(text: str) -> ScenarioConfig:
    """Parse a configuration produced by dump_config (or hand-written)."""
    cp = configparser.ConfigParser()
    cp.read_string(text)
    sc = cp["scenario"]
    st = cp["setting"]
    setting = Setting(
        name=st.get("name", "custom"),
        x1=st.getint("x1"),
        x2=st.getint("x2"),
        k=st.getint("k"),
        delta=st.getfloat("delta", 10.0),
    )
    profile: Profile | None = None
    if cp.has_section("profile") and cp["profile"].get("name", "off") != "off":
        pf = cp["profile"]
        profile = Profile(
            name=pf.get("name"),
            event_rate=pf.getfloat("event_rate_per_s"),
            play_frac=pf.getfloat("play_frac"),
            jump_frac=pf.getfloat("jump_frac"),
            pause_frac=pf.getfloat("pause_frac"),
            probs=(
                pf.getfloat("p_play"),
                pf.getfloat("p_pause"),
                pf.getfloat("p_jump_backward"),
                pf.getfloat("p_jump_forward"),
            ),
        )
    run = cp["run"]
    return ScenarioConfig(
        scenario=sc.get("name", "custom"),
        f_size=sc.getint("f_size_bytes"),
        s_size=sc.getint("s_size"),
        seeds=sc.getint("seeds", 1),
        r_up=sc.getfloat("r_up_bytes_s", 20 * KB),
        r_down=sc.getfloat("r_down_bytes_s", 20 * KB),
        r_play=sc.getfloat("r_play_bytes_s", 20 * KB),
        p_size=sc.getint("p_size_bytes", 256 * KB),
        b_size=sc.getint("b_size_bytes", 16 * KB),
        setting=setting,
        profile=profile,
        protocol=run.get("protocol", "eisp"),
        sim_time=run.getfloat("sim_time", 1.0e6),
        runs=run.getint("runs", 10),
        master_seed=run.getint("master_seed", 1),
    )


def load_config_file(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())
