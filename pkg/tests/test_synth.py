import numpy as np
import pytest

from lfx import landmarks, preprocess
from lfx.synth import SynthConfig, face_template, generate, manifest_for


SMALL = SynthConfig(n_real=3, n_fake=3, frames=720, seed=7)


def coords_array(seq):
    return np.array([[(p.x, p.y) for p in f.points] for f in seq.frames])


def test_template_has_68_distinct_points():
    template = face_template()
    assert template.shape == (68, 2)
    assert len({tuple(p) for p in np.round(template, 9)}) == 68


def test_generate_counts_and_labels():
    seqs = generate(SMALL)
    assert len(seqs) == 6
    assert sum(s.label for s in seqs) == 3
    assert all(len(s.frames) == 720 for s in seqs)
    assert all(landmarks.validate_sequence(s) == [] for s in seqs)


def test_generate_same_seed_bit_identical():
    a = generate(SMALL)
    b = generate(SMALL)
    assert landmarks.serialize_csv(a) == landmarks.serialize_csv(b)


def test_generate_rejects_empty_class():
    with pytest.raises(ValueError):
        generate(SynthConfig(n_real=0, n_fake=1))


def test_coordinates_bounded_by_inflated_template_box():
    cfg = SynthConfig(n_real=2, n_fake=2, frames=200, seed=3)
    template = face_template()
    inflate = cfg.motion_amplitude * 1.4 + cfg.jitter_amplitude + 1e-9
    lo = template.min(axis=0) - inflate
    hi = template.max(axis=0) + inflate
    for seq in generate(cfg):
        coords = coords_array(seq)
        assert np.all(coords >= lo) and np.all(coords <= hi)


def test_fake_pooled_positions_match_real_within_2_alpha():
    cfg = SynthConfig(n_real=6, n_fake=6, frames=240, seed=11)
    seqs = generate(cfg)
    real = np.concatenate([coords_array(s) for s in seqs if s.label == 0])
    fake = np.concatenate([coords_array(s) for s in seqs if s.label == 1])
    gap = np.abs(real.mean(axis=0) - fake.mean(axis=0))
    assert np.all(gap < 2 * cfg.jitter_amplitude)


def d1_variance(seqs):
    out = []
    for seq in seqs:
        for pre in preprocess.standardize_length(seq):
            seg = preprocess.build_segment(pre)
            out.append(seg.features[1:, 136:272].var())
    return float(np.mean(out))


def test_fake_d1_variance_strictly_higher():
    cfg = SynthConfig(n_real=4, n_fake=4, frames=720, jitter_amplitude=0.02, seed=5)
    seqs = generate(cfg)
    real_var = d1_variance([s for s in seqs if s.label == 0])
    fake_var = d1_variance([s for s in seqs if s.label == 1])
    assert fake_var > real_var


def test_null_signal_control_statistically_identical():
    cfg = SynthConfig(n_real=4, n_fake=4, frames=720, jitter_amplitude=0.0, seed=5)
    seqs = generate(cfg)
    real_var = d1_variance([s for s in seqs if s.label == 0])
    fake_var = d1_variance([s for s in seqs if s.label == 1])
    assert fake_var == pytest.approx(real_var, rel=0.5)


def test_manifest_for():
    seqs = generate(SMALL)
    manifest = manifest_for(seqs)
    assert len(manifest) == 6
    assert manifest["real_000"] == 0 and manifest["fake_002"] == 1
