import argparse
import json

import pytest

from pypolya import config, init
from pypolya.errors import ValidationError
from pypolya.gibbs import ModelConfig


@pytest.mark.parametrize(
    'key, expected',
    [
        ('fix_alpha', 'fix_alpha'),
        ('fix-alpha', 'fix_alpha'),
        ('fixAlpha', 'fix_alpha'),
        ('A', 'A'),
        ('a', 'a'),
        (' burnin ', 'burnin'),
    ],
)
def test_to_snake(key, expected):
    assert config.to_snake(key) == expected


def test_ini_without_section_header(tmp_path):
    path = tmp_path / 'model.ini'
    path.write_text('a = 1.5\nA = 30\nfixAlpha = 2\nremix = no\niterations = 7\n')
    model = config.load_model_config(path)
    assert model.a == 1.5
    assert model.A == 30.0
    assert model.fix_alpha == 2.0
    assert model.remix is False
    assert model.iterations == 7
    # untouched settings keep their defaults
    assert model.W == ModelConfig().W


def test_ini_with_section_and_empty_optional(tmp_path):
    path = tmp_path / 'model.ini'
    path.write_text('[model]\nfix-mu =\nthin = 3\n')
    model = config.load_model_config(path)
    assert model.fix_mu is None
    assert model.thin == 3


def test_json_flat_and_nested(tmp_path):
    flat = tmp_path / 'flat.json'
    flat.write_text(json.dumps({'fixTau': 0.5, 'seed': 4}))
    nested = tmp_path / 'nested.json'
    nested.write_text(json.dumps({'model': {'fix_tau': 0.5, 'seed': 4}}))
    assert config.load_model_config(flat) == config.load_model_config(nested)
    assert config.load_model_config(flat).fix_tau == 0.5


@pytest.mark.parametrize(
    'text',
    [
        'alpha = 1\n',
        'iterations = many\n',
        'remix = maybe\n',
        'thin = 0\n',
    ],
)
def test_bad_ini_values(tmp_path, text):
    path = tmp_path / 'model.ini'
    path.write_text(text)
    with pytest.raises(ValidationError):
        config.load_model_config(path)


def test_unsupported_suffix(tmp_path):
    path = tmp_path / 'model.yaml'
    path.write_text('a: 1\n')
    with pytest.raises(ValidationError):
        config.load_model_config(path)


def test_flags_override_config_file(tmp_path):
    path = tmp_path / 'model.ini'
    path.write_text('iterations = 7\nseed = 1\nfix_alpha = 2\n')
    args = argparse.Namespace(
        config=path,
        iters=None,
        burnin=None,
        thin=None,
        seed=9,
        fix_alpha=None,
        fix_mu=None,
        fix_tau=None,
        no_remix=True,
    )
    model = config.resolve_model_config(args)
    assert model.iterations == 7
    assert model.seed == 9
    assert model.fix_alpha == 2.0
    assert model.remix is False


@pytest.mark.parametrize('suffix', ['ini', 'json'])
def test_init_config_round_trips_defaults(tmp_path, suffix):
    path = tmp_path / f'model.{suffix}'
    init.init_config(path)
    assert config.load_model_config(path) == ModelConfig()


def test_init_config_rejects_unknown_format(tmp_path):
    with pytest.raises(ValidationError):
        init.init_config(tmp_path / 'model.toml')
