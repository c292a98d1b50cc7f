"""Versioned JSON model files

Layout: {"format": "tmsquared-model", "version": 1, "config": {...},
"train_config": {...} or null, "params": {name: nested lists}}. Floats are
written in shortest round-trip form, so save -> load -> save is bit-exact.
"""

import json
from dataclasses import asdict

import numpy as np

from tmsquared.errors import ModelFileError, ModelVersionError
from tmsquared.forecast import ForecastModel, ModelConfig
from tmsquared.training import TrainConfig

FORMAT = "tmsquared-model"
VERSION = 1


def model_to_dict(model):
    """JSON-able document of a model"""
    config = asdict(model.config)
    config["kernel_sizes"] = list(config["kernel_sizes"])
    return {
        "format": FORMAT,
        "version": VERSION,
        "config": config,
        "train_config": (
            asdict(model.train_config) if model.train_config is not None else None
        ),
        "params": {name: value.tolist() for name, value in sorted(model.params.items())},
    }


def model_from_dict(document):
    """Model from a document written by model_to_dict"""
    if not isinstance(document, dict) or document.get("format") != FORMAT:
        raise ModelFileError("not a tmsquared model file")
    if document.get("version") != VERSION:
        raise ModelVersionError(
            f"model file version {document.get('version')} is not supported"
            f" (expected {VERSION})"
        )
    try:
        config = ModelConfig(**document["config"])
        train_config = (
            TrainConfig(**document["train_config"])
            if document.get("train_config") is not None
            else None
        )
        params = {
            name: np.array(value, dtype=float)
            for name, value in document["params"].items()
        }
        return ForecastModel(config, params, train_config)
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError) as exception:
        raise ModelFileError(f"corrupt model file: {exception}") from exception


def save_model(model, path):
    """Write a model file"""
    with open(path, "w", encoding="utf-8") as model_file:
        json.dump(model_to_dict(model), model_file, indent=1)
        model_file.write("\n")


def load_model(path):
    """Read a model file"""
    try:
        with open(path, encoding="utf-8") as model_file:
            document = json.load(model_file)
    except json.JSONDecodeError as exception:
        raise ModelFileError(f"corrupt model file {path}: {exception}") from exception
    return model_from_dict(document)
