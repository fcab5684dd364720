"""
config.py - Load model configuration files and merge them with flags.

A config file is INI (the [model] header may be left out) or JSON (a flat
object or {"model": {...}}). Keys may be snake_case, kebab-case or camelCase;
the single-letter hyperparameters keep their case, so `a` and `A` differ.

Precedence: ModelConfig defaults < config file < command-line flags.
"""

import argparse
import configparser
import json
import logging
import re
import typing
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Optional

from pypolya.errors import ValidationError
from pypolya.gibbs import ModelConfig

log = logging.getLogger(__name__)

MODEL_SECTION_NAME = 'model'
TRUE_WORDS = ('true', '1', 'yes', 'on')
FALSE_WORDS = ('false', '0', 'no', 'off')
NONE_WORDS = ('', 'none', 'null')

# command-line attribute -> ModelConfig field
FLAG_FIELDS = {
    'iters': 'iterations',
    'burnin': 'burnin',
    'thin': 'thin',
    'seed': 'seed',
    'fix_alpha': 'fix_alpha',
    'fix_mu': 'fix_mu',
    'fix_tau': 'fix_tau',
}


def to_snake(key: str) -> str:
    """fixAlpha, fix-alpha and fix_alpha all become fix_alpha; `A` stays `A`."""
    key = key.strip()
    if len(key) <= 1:
        return key
    key = re.sub(r'(?<=[a-z0-9])([A-Z])', r'_\1', key)
    return re.sub(r'[-_]+', '_', key).lower()


def _field_types() -> dict[str, Any]:
    return typing.get_type_hints(ModelConfig)


def coerce_value(name: str, value: Any, kind: Any) -> Any:
    """Convert a raw config value (string from INI, scalar from JSON) to `kind`."""
    optional = typing.get_origin(kind) is typing.Union and type(None) in typing.get_args(kind)
    if optional:
        kind = next(t for t in typing.get_args(kind) if t is not type(None))
    if isinstance(value, str):
        text = value.strip()
        if optional and text.lower() in NONE_WORDS:
            return None
        if kind is bool:
            if text.lower() in TRUE_WORDS:
                return True
            if text.lower() in FALSE_WORDS:
                return False
            raise ValidationError(f'{name}: expected a boolean, got {value!r}')
        value = text
    elif value is None:
        if optional:
            return None
        raise ValidationError(f'{name} may not be empty')
    try:
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return kind(value) if kind is not bool else bool(value)
    except (TypeError, ValueError):
        raise ValidationError(
            f'{name}: expected {kind.__name__}, got {value!r}'
        ) from None


def normalize_model_keys(raw: dict[str, Any]) -> dict[str, Any]:
    types = _field_types()
    model: dict[str, Any] = {}
    for key, value in raw.items():
        name = to_snake(key)
        if name not in types:
            raise ValidationError(f'Unknown model config key {key!r}')
        model[name] = coerce_value(name, value, types[name])
    return model


def load_ini_model(path: Path) -> dict[str, Any]:
    cfg = configparser.ConfigParser()
    # keep key case: `a` and `A` are different hyperparameters
    cfg.optionxform = str
    text = Path(path).read_text(encoding='utf-8')
    try:
        cfg.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError:
        cfg.read_string(f'[{MODEL_SECTION_NAME}]\n{text}', source=str(path))
    except configparser.Error as e:
        raise ValidationError(f'Cannot parse {path}: {e}') from None
    if MODEL_SECTION_NAME not in cfg:
        raise ValidationError(f'Config file {path} missing [{MODEL_SECTION_NAME}] section')
    return normalize_model_keys(dict(cfg[MODEL_SECTION_NAME]))


def load_json_model(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ValidationError(f'Cannot parse {path}: {e}') from None
    if isinstance(data, dict) and isinstance(data.get(MODEL_SECTION_NAME), dict):
        data = data[MODEL_SECTION_NAME]
    if not isinstance(data, dict):
        raise ValidationError(f'Config JSON {path} must be an object at the top level')
    return normalize_model_keys(data)


def load_model_config(path: Path, base: Optional[ModelConfig] = None) -> ModelConfig:
    """Apply the settings in `path` on top of `base` (defaults when omitted)."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext in ('.ini', '.cfg', ''):
        overrides = load_ini_model(path)
    elif ext == '.json':
        overrides = load_json_model(path)
    else:
        raise ValidationError(f'Unsupported config format: {path}')
    log.debug('Config %s sets %s', path, sorted(overrides))
    return replace(base or ModelConfig(), **overrides).validate()


def resolve_model_config(args: argparse.Namespace) -> ModelConfig:
    """Defaults, then --config, then any flags that were given."""
    config = ModelConfig()
    if getattr(args, 'config', None):
        config = load_model_config(args.config, config)
    overrides = {
        field: getattr(args, flag)
        for flag, field in FLAG_FIELDS.items()
        if getattr(args, flag, None) is not None
    }
    if getattr(args, 'no_remix', False):
        overrides['remix'] = False
    return replace(config, **overrides).validate()


def default_model_dict() -> dict[str, Any]:
    return {f.name: f.default for f in fields(ModelConfig)}
