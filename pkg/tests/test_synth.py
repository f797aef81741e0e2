import numpy as np
import pytest

import shapebench as sb
from helpers import assert_records_equal
from shapebench.errors import DomainError
from shapebench.exclusion import ContrastMode
from shapebench.matcher import Outcome


def spec(dims, radius, mode=ContrastMode.NONE):
    return sb.ExclusionSpec(sb.Cvt.parse(dims), radius, mode)


class TestParams:
    def test_defaults_valid(self):
        p = sb.SynthParams()
        assert p.n_objects == 4
        assert p.n_rows == 4 * 31 * 11

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dim=4),
            dict(tangle=1.5),
            dict(noise=-1.0),
            dict(contrasts=3),
            dict(n_categories=0),
            dict(twin_pairs=3),  # only 4 objects by default
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            sb.SynthParams(**kwargs)


class TestGenerate:
    def test_manifest_is_complete_grid(self, clean_dataset):
        matrix, manifest = clean_dataset
        # construction validates completeness; shape checks on top
        assert manifest.n_rows == 4 * 31 * 11
        assert sb.validate_manifest(manifest.names()).n_rows == manifest.n_rows
        assert matrix.data.shape == (manifest.n_rows, 64)
        assert matrix.data.dtype == np.float32

    def test_same_seed_same_bytes(self, tmp_path):
        params = sb.SynthParams(n_categories=1, instances_per_category=2, dim=16, seed=9,
                                noise=0.1, contrasts=2, contrast_shift=0.3)
        for tag in ("a", "b"):
            matrix, manifest = sb.generate(params)
            sb.write_embeddings(matrix, manifest, tmp_path / f"{tag}.emb", tmp_path / f"{tag}.names")
        assert (tmp_path / "a.emb").read_bytes() == (tmp_path / "b.emb").read_bytes()
        assert (tmp_path / "a.names").read_bytes() == (tmp_path / "b.names").read_bytes()

    def test_different_seed_different_bytes(self):
        a, _ = sb.generate(sb.SynthParams(seed=1, dim=16))
        b, _ = sb.generate(sb.SynthParams(seed=2, dim=16))
        assert not np.array_equal(a.data, b.data)

    def test_rows_are_unit_norm(self, clean_dataset):
        matrix, _ = clean_dataset
        norms = np.linalg.norm(matrix.data.astype(np.float64), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-5)

    def test_light_rows_shifted(self):
        params = sb.SynthParams(n_categories=1, instances_per_category=1, dim=16, seed=0,
                                contrasts=2, contrast_shift=0.5)
        matrix, manifest = sb.generate(params)
        dark = matrix.data[manifest.polarity == 0]
        light = matrix.data[manifest.polarity == 1]
        assert not np.allclose(dark, light)


class TestOracle:
    def test_clean_dataset_error_free_both_engines(self, clean_dataset):
        matrix, manifest = clean_dataset
        normalized = sb.preprocess(matrix, sb.Metric.COSINE)
        specs = [spec("pw", r) for r in [None, 0, 1, 3, 5]] + [spec("p", 2), spec("xyprw", 1)]
        for records in (
            sb.match_all(normalized, manifest, specs, sb.Metric.COSINE),
            sb.oracle_match_grid(matrix, manifest, specs, sb.Metric.COSINE),
        ):
            assert all(
                r.outcome in (Outcome.CORRECT, Outcome.SKIPPED) for r in records
            )

    def test_exact_twins_fail_exactly_as_oracle_says(self):
        params = sb.SynthParams(n_categories=2, instances_per_category=1, dim=32, seed=5,
                                noise=0.08, twin_pairs=1, step_scale=0.1)
        matrix, manifest = sb.generate(params)
        normalized = sb.preprocess(matrix, sb.Metric.CORRELATION)
        specs = [spec("pw", r) for r in range(6)]
        got = sb.match_all(normalized, manifest, specs)
        want = sb.oracle_match_grid(matrix, manifest, specs)
        assert_records_equal(got, want)
        # twins are close enough that at least some references fail
        assert any(r.outcome is Outcome.INCORRECT for r in want)

    def test_hand_computed_six_views(self):
        # one reference, two same-object candidates, three distractors;
        # correlations checked against numpy's corrcoef independently
        names = [
            "ball.00.p.05.d",
            "ball.00.p.08.d",
            "ball.00.pw.01.d",
            "ball.01.p.05.d",
            "cube.00.p.05.d",
            "cube.00.p.06.d",
        ]
        manifest = sb.Manifest.from_views([sb.parse_view_name(n) for n in names], partial=True)
        data = np.array(
            [
                [1.0, 2.0, 3.0, 4.0],
                [1.0, 2.1, 2.9, 4.2],
                [4.0, 3.0, 2.0, 1.0],
                [1.0, 2.0, 3.5, 3.9],
                [0.9, 2.2, 3.1, 3.8],
                [2.0, 2.0, 4.0, 1.0],
            ],
            np.float32,
        )
        matrix = sb.EmbeddingMatrix(data=data, manifest=manifest)
        ref_corr = np.corrcoef(data.astype(np.float64))

        s = spec("p", 1)
        records = sb.oracle_match(matrix, manifest, s)
        rec = next(r for r in records if r.ref_row == 0)
        # PMCs for row 0 under p:1 are rows 1 (distance 3) only; row 2 is in
        # series pw (superset) at distance 4
        assert {rec.best_pmc.row} <= {1, 2}
        # by hand: corr(0,1) ~ 0.998 beats corr(0,2) = -1
        assert rec.best_pmc.row == 1
        assert rec.best_pmc.score == pytest.approx(ref_corr[0, 1], abs=1e-6)
        # distractors: rows 3 (same category) and 4, 5; corr(0,3) ~ 0.987,
        # corr(0,4) ~ 0.992, corr(0,5) ~ -0.07; top1 must be the pmc row 1
        assert rec.top1.row == 1
        assert rec.outcome is Outcome.CORRECT

        rec2 = next(r for r in records if r.ref_row == 3)
        # for ball.01 the only same-object candidates are none (single view),
        # so the record is skipped
        assert rec2.outcome is Outcome.SKIPPED

    def test_empty_pmc_skipped(self):
        params = sb.SynthParams(n_categories=1, instances_per_category=1, dim=16, seed=0)
        matrix, manifest = sb.generate(params)
        records = sb.oracle_match(matrix, manifest, spec("pw", 5))
        frame5 = [r for r in records if r.reference.frame == 5]
        assert frame5 and all(r.outcome is Outcome.SKIPPED for r in frame5)

    def test_oracle_rejects_contrast_modes_without_light(self):
        params = sb.SynthParams(n_categories=1, instances_per_category=1, dim=16, seed=0)
        matrix, manifest = sb.generate(params)
        with pytest.raises(DomainError):
            sb.oracle_match(matrix, manifest, spec("p", 1, ContrastMode.HARD))
