import math

import pytest

from readspont.alphabet import Label
from readspont.features import DerivedFeatures, MeasuredFeatures, derive
from readspont.scoring import (
    DEFAULT_PARAMS,
    ConfigError,
    NonFiniteInput,
    RulePolarity,
    ScoreParams,
    classify,
    is_borderline,
    score,
    sigmoid,
)

from oracles import read_score

# high-precision evaluations of the score at the two reference feature columns
R_SPONT = 2.3400683433953597
R_READ = 1.6824551707668407

SPONT_FEATURES = (27.75, 7.63, 1.45)
READ_FEATURES = (13.21, 13.92, 2.43)


def features(f1, f2, f3):
    return DerivedFeatures(awl=None, aps=None, wps=f3, inactive_aps=f2, active_awl=f1)


def test_frozen_values_match_oracle():
    assert read_score(*SPONT_FEATURES) == pytest.approx(R_SPONT, abs=1e-15)
    assert read_score(*READ_FEATURES) == pytest.approx(R_READ, abs=1e-15)


def test_defaults():
    p = ScoreParams()
    assert (p.lambda1, p.lambda2, p.lambda3) == (1, 1, 1)
    assert (p.tau1, p.tau2, p.tau3, p.tau_r, p.delta) == (6, 10, 1.75, 1.75, 0.05)
    assert p.rule_polarity is RulePolarity.SPONTANEOUS_ABOVE


@pytest.mark.parametrize("feats, expected", [(SPONT_FEATURES, R_SPONT), (READ_FEATURES, R_READ)])
def test_score_reference_columns(feats, expected):
    assert score(*feats) == pytest.approx(expected, abs=1e-12)
    assert score(*feats) == pytest.approx(round(expected, 3), abs=0.005)


def test_score_midpoint():
    assert score(6, 10, 1.75) == 1.5


def test_score_rejects_non_finite():
    for bad in (float("nan"), float("inf"), -float("inf"), None):
        with pytest.raises(NonFiniteInput):
            score(bad, 10, 1.75)


@pytest.mark.parametrize("z", [-1000.0, -745.0, -40.0, 0.0, 40.0, 745.0, 1000.0])
def test_sigmoid_never_overflows(z):
    v = sigmoid(z)
    assert 0.0 <= v <= 1.0 and not math.isnan(v)
    assert sigmoid(-z) == pytest.approx(1 - v, abs=1e-15)


def test_sigmoid_saturates_exactly():
    assert sigmoid(1e6) == 1.0
    assert sigmoid(-1e6) == 0.0


def test_classify_reference_columns():
    d = classify(features(*SPONT_FEATURES))
    assert d.label is Label.SPONTANEOUS and not d.borderline
    assert d.score == pytest.approx(2.340, abs=0.005)
    d = classify(features(*READ_FEATURES))
    assert d.label is Label.READ and not d.borderline
    assert d.score == pytest.approx(1.683, abs=0.005)


def test_classify_from_measured_columns():
    spont = derive(MeasuredFeatures(47.62, 69, 2382, 1915, 364))
    read = derive(MeasuredFeatures(29.67, 72, 1484, 951, 413))
    assert classify(spont).label is Label.SPONTANEOUS
    assert classify(read).label is Label.READ


def test_paper_literal_polarity_inverts():
    p = ScoreParams(rule_polarity=RulePolarity.READ_ABOVE)
    assert classify(features(*SPONT_FEATURES), p).label is Label.READ
    assert classify(features(*READ_FEATURES), p).label is Label.SPONTANEOUS


def test_undefined_feature_is_undetermined():
    d = classify(features(13.0, 12.0, None))
    assert d.label is Label.UNDETERMINED
    assert d.score is None and d.borderline is False


def test_threshold_boundary_goes_to_upper_class():
    p = ScoreParams(tau_r=1.5)
    assert classify(features(6, 10, 1.75), p).label is Label.SPONTANEOUS
    p = ScoreParams(tau_r=1.5, rule_polarity="paper-literal")
    assert classify(features(6, 10, 1.75), p).label is Label.READ


def test_borderline_band_edges():
    p = ScoreParams(tau_r=1.5, delta=0.25)
    assert is_borderline(1.25, p) and is_borderline(1.75, p) and is_borderline(1.5, p)
    assert not is_borderline(math.nextafter(1.25, 0), p)
    assert not is_borderline(math.nextafter(1.75, 3), p)


def test_zero_delta_band_is_a_point():
    p = ScoreParams(delta=0.0)
    assert is_borderline(1.75, p)
    assert not is_borderline(math.nextafter(1.75, 0), p)
    assert not is_borderline(math.nextafter(1.75, 3), p)


@pytest.mark.parametrize(
    "kwargs",
    [dict(lambda1=0), dict(lambda3=-1), dict(delta=-0.01), dict(tau_r=3.1), dict(tau_r=-0.1), dict(tau1=float("nan"))],
)
def test_invalid_params(kwargs):
    with pytest.raises(ConfigError):
        ScoreParams(**kwargs)


def test_params_from_mapping_and_file(tmp_path):
    p = ScoreParams.from_mapping({"tau-r": "1.6", "delta": 0.1, "rule_polarity": "paper-literal"})
    assert p.tau_r == 1.6 and p.delta == 0.1 and p.rule_polarity is RulePolarity.READ_ABOVE
    assert p.tau1 == DEFAULT_PARAMS.tau1

    path = tmp_path / "params.cfg"
    path.write_text(p.to_text())
    assert ScoreParams.from_file(path) == p

    path.write_text("# comment\n\ntau1 = 7  # trailing\n")
    assert ScoreParams.from_file(path).tau1 == 7


@pytest.mark.parametrize("mapping", [{"tau4": 1}, {"tau1": "six"}, {"rule_polarity": "sideways"}])
def test_bad_mapping(mapping):
    with pytest.raises(ConfigError):
        ScoreParams.from_mapping(mapping)


def test_bad_param_file_line(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text("tau1 6\n")
    with pytest.raises(ConfigError):
        ScoreParams.from_file(path)
