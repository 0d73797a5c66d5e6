import numpy as np
import pytest

from voxelscore.config import (
    RunConfig,
    load_config_file,
    parse_config_text,
    resolve_config,
)
from voxelscore.errors import InputError


def test_defaults():
    cfg = RunConfig()
    assert cfg.k == 5
    assert cfg.outer_folds_pooled == 20
    assert cfg.outer_folds_subject == 5
    assert cfg.inner_folds == 5
    assert cfg.eps == 0.01
    assert cfg.n_ceiling_splits == 20
    assert cfg.seed == 0
    assert cfg.workers == 0
    np.testing.assert_allclose(cfg.penalty_grid, np.logspace(-1, 8, 10))


def test_grid_helper_matches_tuple():
    cfg = RunConfig(penalty_grid=(1.0, 2.0, 4.0))
    np.testing.assert_array_equal(cfg.grid().values, [1.0, 2.0, 4.0])


@pytest.mark.parametrize(
    "kwargs,message",
    [
        (dict(k=0), "k must"),
        (dict(outer_folds_pooled=1), "outer_folds_pooled"),
        (dict(outer_folds_subject=0), "outer_folds_subject"),
        (dict(inner_folds=1), "inner_folds"),
        (dict(eps=0.0), "eps"),
        (dict(eps=-0.1), "eps"),
        (dict(n_ceiling_splits=0), "n_ceiling_splits"),
        (dict(workers=-1), "workers"),
        (dict(penalty_grid=(2.0, 1.0)), "increasing"),
        (dict(penalty_grid=(-1.0,)), "positive"),
        (dict(penalty_grid=()), "empty"),
    ],
)
def test_validation(kwargs, message):
    with pytest.raises(InputError, match=message):
        RunConfig(**kwargs)


def test_sidecar_dict_excludes_workers():
    side = RunConfig(workers=9).sidecar_dict()
    assert "workers" not in side
    assert side["k"] == 5
    assert side["penalty_grid"] == list(np.logspace(-1, 8, 10))
    assert set(side) == {
        "k", "penalty_grid", "outer_folds_pooled", "outer_folds_subject",
        "inner_folds", "eps", "n_ceiling_splits", "seed",
    }


def test_parse_text_types_and_comments():
    text = """
# comment line
k = 3          # trailing comment
eps = 0.05
penalty_grid = 0.1, 1.0, 10.0
seed=7
"""
    vals = parse_config_text(text)
    assert vals == {
        "k": 3,
        "eps": 0.05,
        "penalty_grid": (0.1, 1.0, 10.0),
        "seed": 7,
    }
    assert isinstance(vals["k"], int)
    assert isinstance(vals["eps"], float)


def test_parse_text_errors():
    with pytest.raises(InputError, match="line 1"):
        parse_config_text("not an assignment")
    with pytest.raises(InputError, match="unknown key"):
        parse_config_text("banana = 2")
    with pytest.raises(InputError, match="bad value"):
        parse_config_text("k = soon")
    with pytest.raises(InputError, match="line 3"):
        parse_config_text("k = 2\n\nworkers = many")


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("k = 4\nworkers = 2\n")
    assert load_config_file(path) == {"k": 4, "workers": 2}
    with pytest.raises(InputError, match="cannot read"):
        load_config_file(tmp_path / "absent.cfg")


def test_resolve_precedence():
    cfg = resolve_config({"k": 3, "seed": 5}, {"seed": 9, "eps": None})
    assert cfg.k == 3       # from file
    assert cfg.seed == 9    # override wins
    assert cfg.eps == 0.01  # None override skipped, default kept


def test_resolve_defaults_when_empty():
    assert resolve_config() == RunConfig()
    assert resolve_config(None, None) == RunConfig()


def test_resolve_rejects_unknown_keys():
    with pytest.raises(InputError, match="unknown config key"):
        resolve_config({"bogus": 1})


def test_resolved_config_is_validated():
    with pytest.raises(InputError, match="k must"):
        resolve_config({"k": 0})
