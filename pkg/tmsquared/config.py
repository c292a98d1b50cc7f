"""Run configuration read from an INI file

Lookup order: explicit path, TMSQUARED_CONFIG, ~/.tmsquared/config.ini, then
the default.ini shipped with the package, whose values also fill in whatever
the chosen file leaves out. Relative paths resolve against the
directory of the file they appear in; "package:" paths point into the
package data directory.
"""

import os
from configparser import ConfigParser
from dataclasses import dataclass, field, replace

from tmsquared.benchmark import BenchmarkConfig
from tmsquared.decompose import DEFAULT_KERNELS
from tmsquared.errors import ConfigError
from tmsquared.forecast import ModelConfig
from tmsquared.llsa import ChangePointConfig
from tmsquared.training import TrainConfig

ENV_VAR = "TMSQUARED_CONFIG"
PACKAGE_PREFIX = "package:"
DATA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
DEFAULT_CONFIG = os.path.join(DATA_PATH, "default.ini")
USER_CONFIG = os.path.expanduser("~/.tmsquared/config.ini")
PATH_KEYS = ("data", "pressure", "ahp_own", "ahp_opponent", "rankings", "model", "output")


def config_path(explicit=None):
    """Configuration file to read"""
    if explicit:
        return explicit
    if os.environ.get(ENV_VAR):
        return os.environ[ENV_VAR]
    if os.path.exists(USER_CONFIG):
        return USER_CONFIG
    return DEFAULT_CONFIG


def resolve_path(value, base):
    """Absolute path of a config value, None when empty"""
    value = value.strip()
    if not value:
        return None
    if value.startswith(PACKAGE_PREFIX):
        return os.path.join(DATA_PATH, value[len(PACKAGE_PREFIX) :])
    value = os.path.expanduser(value)
    if os.path.isabs(value):
        return value
    return os.path.normpath(os.path.join(base, value))


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, resolved"""

    paths: dict = field(default_factory=dict)
    changepoint: ChangePointConfig = ChangePointConfig()
    wavelet: str = "haar"
    limiting_factor: float = 1.0
    history: int = 64
    causal: bool = True
    strict_pressure: bool = False
    n_jobs: int = 1
    model: ModelConfig = ModelConfig()
    train: TrainConfig = TrainConfig()
    benchmark: BenchmarkConfig = BenchmarkConfig()
    source: str = DEFAULT_CONFIG

    def path(self, name):
        """Resolved path of a [paths] entry"""
        return self.paths.get(name)

    def with_paths(self, **paths):
        """Copy with some [paths] entries replaced (None keeps the current one)"""
        merged = dict(self.paths)
        merged.update({name: value for name, value in paths.items() if value})
        return replace(self, paths=merged)

    def validate(self, names=("pressure", "ahp_own", "ahp_opponent", "rankings")):
        """Raise ConfigError unless the named paths are set and exist"""
        for name in names:
            value = self.path(name)
            if not value:
                raise ConfigError(f"[paths] {name} is not set")
            if not os.path.exists(value):
                raise ConfigError(f"[paths] {name}: {value} does not exist")
        return self

    def to_parser(self):
        """ConfigParser holding the resolved values"""
        parser = ConfigParser()
        parser["paths"] = {name: self.paths.get(name) or "" for name in PATH_KEYS}
        parser["changepoint"] = {
            "levels": "" if self.changepoint.levels is None else str(self.changepoint.levels),
            "depth": "" if self.changepoint.depth is None else str(self.changepoint.depth),
            "max_jumps": str(self.changepoint.max_jumps),
            "threshold": repr(self.changepoint.threshold),
            "wavelet": self.wavelet,
        }
        parser["momentum"] = {
            "limiting_factor": repr(self.limiting_factor),
            "history": str(self.history),
            "causal": str(self.causal).lower(),
            "strict_pressure": str(self.strict_pressure).lower(),
            "n_jobs": str(self.n_jobs),
        }
        parser["decompose"] = {
            "kernels": ",".join(str(size) for size in self.model.kernel_sizes)
        }
        parser["train"] = {
            "window": str(self.model.window),
            "hidden": str(self.model.hidden),
            "key_dim": str(self.model.key_dim),
            "attention_levels": str(self.model.attention_levels),
            "learning_rate": repr(self.train.learning_rate),
            "epochs": str(self.train.epochs),
            "batch_size": str(self.train.batch_size),
            "optimizer": self.train.optimizer,
            "momentum": repr(self.train.momentum),
            "clip_norm": "" if self.train.clip_norm is None else repr(self.train.clip_norm),
            "seed": str(self.train.seed),
        }
        parser["eval"] = {
            "repetitions": str(self.benchmark.repetitions),
            "train_fraction": repr(self.benchmark.train_fraction),
            "seed": str(self.benchmark.split_seed),
            "n_jobs": str(self.benchmark.n_jobs),
        }
        return parser

    def write(self, path):
        """Write the resolved configuration"""
        with open(path, "w", encoding="utf-8") as config_file:
            self.to_parser().write(config_file)


def _optional_int(parser, section, option):
    value = parser.get(section, option, fallback="").strip()
    return int(value) if value else None


def _kernels(parser):
    value = parser.get("decompose", "kernels", fallback="")
    if not value.strip():
        return DEFAULT_KERNELS
    return tuple(int(size) for size in value.split(","))


def _clip_norm(parser):
    value = parser.get("train", "clip_norm", fallback="").strip()
    return float(value) if value else None


def load_config(path=None):
    """Read and validate the sub-configs of a configuration file"""
    path = config_path(path)
    if not os.path.exists(path):
        raise ConfigError(f"configuration file {path} does not exist")
    parser = ConfigParser()
    parser.read([DEFAULT_CONFIG, path], encoding="utf-8")
    base = os.path.dirname(os.path.abspath(path))
    try:
        paths = {
            name: resolve_path(parser.get("paths", name, fallback=""), base)
            for name in PATH_KEYS
        }
        changepoint = ChangePointConfig(
            levels=_optional_int(parser, "changepoint", "levels"),
            depth=_optional_int(parser, "changepoint", "depth"),
            max_jumps=parser.getint("changepoint", "max_jumps", fallback=10),
            threshold=parser.getfloat("changepoint", "threshold", fallback=3.0),
        )
        model = ModelConfig(
            window=parser.getint("train", "window", fallback=400),
            hidden=parser.getint("train", "hidden", fallback=64),
            key_dim=parser.getint("train", "key_dim", fallback=8),
            attention_levels=parser.getint("train", "attention_levels", fallback=2),
            kernel_sizes=_kernels(parser),
            wavelet=parser.get("changepoint", "wavelet", fallback="haar"),
        )
        train = TrainConfig(
            learning_rate=parser.getfloat("train", "learning_rate", fallback=0.01),
            epochs=parser.getint("train", "epochs", fallback=10),
            batch_size=parser.getint("train", "batch_size", fallback=32),
            seed=parser.getint("train", "seed", fallback=0),
            optimizer=parser.get("train", "optimizer", fallback="sgd"),
            momentum=parser.getfloat("train", "momentum", fallback=0.9),
            clip_norm=_clip_norm(parser),
        )
        benchmark = BenchmarkConfig(
            repetitions=parser.getint("eval", "repetitions", fallback=100),
            train_fraction=parser.getfloat("eval", "train_fraction", fallback=0.8),
            split_seed=parser.getint("eval", "seed", fallback=0),
            n_jobs=parser.getint("eval", "n_jobs", fallback=1),
        )
        return RunConfig(
            paths=paths,
            changepoint=changepoint,
            wavelet=model.wavelet,
            limiting_factor=parser.getfloat("momentum", "limiting_factor", fallback=1.0),
            history=parser.getint("momentum", "history", fallback=64),
            causal=parser.getboolean("momentum", "causal", fallback=True),
            strict_pressure=parser.getboolean("momentum", "strict_pressure", fallback=False),
            n_jobs=parser.getint("momentum", "n_jobs", fallback=1),
            model=model,
            train=train,
            benchmark=benchmark,
            source=path,
        )
    except ConfigError:
        raise
    except ValueError as exception:
        raise ConfigError(f"{path}: {exception}") from exception
