import numpy as np
import pytest

from paddetect.constellation import (
    MIN_AMPLITUDE,
    QAM_ORDERS,
    Constellation,
    SapskSpec,
    load_constellation,
    make_qam,
    make_sapsk,
    normalize,
    parse_source,
    sapsk_populations,
    save_constellation,
)


def check_invariants(c: Constellation):
    assert c.M >= 2
    assert abs(c.energy - 1.0) <= 1e-9
    assert np.min(np.abs(c.points)) >= MIN_AMPLITUDE
    d = np.abs(c.points[:, None] - c.points[None, :])
    np.fill_diagonal(d, np.inf)
    assert d.min() > 1e-9


class TestQam:
    def test_qpsk(self):
        c = make_qam(4)
        expected = {complex(i, q) / np.sqrt(2) for i in (-1, 1) for q in (-1, 1)}
        assert len(c.points) == 4
        for s in c.points:
            assert min(abs(s - e) for e in expected) < 1e-15

    def test_16qam_scale(self):
        grid = np.array([i + 1j * q for i in (-3, -1, 1, 3) for q in (-3, -1, 1, 3)])
        # average energy of the odd grid is 10
        assert np.mean(grid.real**2 + grid.imag**2) == 10.0
        c = make_qam(16)
        np.testing.assert_allclose(np.sort_complex(c.points), np.sort_complex(grid / np.sqrt(10)), atol=1e-15)

    @pytest.mark.parametrize("M", QAM_ORDERS)
    def test_invariants_and_symmetry(self, M):
        c = make_qam(M)
        assert c.M == M
        check_invariants(c)
        assert abs(c.centroid) <= 1e-15
        pts = set(np.round(c.points * 1e9).tolist())
        assert set(np.round(np.conj(c.points) * 1e9).tolist()) == pts
        assert set(np.round(-np.conj(c.points) * 1e9).tolist()) == pts

    def test_cross_32_shape(self):
        c = make_qam(32)
        raw = c.points * np.sqrt(np.mean(np.abs(make_qam(32).points) ** 2))
        lv = np.unique(np.round(np.abs(c.points.real) / np.min(np.abs(c.points.real)), 9))
        assert lv.tolist() == [1.0, 3.0, 5.0]
        # corners (5, 5) are removed
        scale = np.min(np.abs(c.points.real))
        corners = (np.abs(c.points.real) > 4 * scale) & (np.abs(c.points.imag) > 4 * scale)
        assert not corners.any()
        assert raw.size == 32

    def test_cross_128_corner_blocks(self):
        c = make_qam(128)
        unit = np.min(np.abs(c.points.real))
        i = np.round(np.abs(c.points.real) / unit).astype(int)
        q = np.round(np.abs(c.points.imag) / unit).astype(int)
        assert i.max() == 11
        assert not np.any((i > 7) & (q > 7))

    @pytest.mark.parametrize("M", [2, 8, 17, 512])
    def test_unsupported(self, M):
        with pytest.raises(ValueError, match="unsupported QAM order"):
            make_qam(M)


class TestSapsk:
    def test_single_ring_is_psk(self):
        c = make_sapsk(SapskSpec(8, 1, 0.7))
        np.testing.assert_allclose(np.abs(c.points), 1.0, atol=1e-15)
        np.testing.assert_allclose(c.points, np.exp(2j * np.pi * np.arange(8) / 8), atol=1e-15)

    def test_two_rings(self):
        assert sapsk_populations(16, 2).tolist() == [5, 11]
        c = make_sapsk(SapskSpec(16, 2, 1.0))
        r = np.abs(c.points)
        r1, r2 = r[:5], r[5:]
        np.testing.assert_allclose(r1, r1[0], rtol=1e-15)
        np.testing.assert_allclose(r2, 2 * r1[0], rtol=1e-14)
        # 5 r1^2 + 11 (2 r1)^2 = 16  ->  r1^2 = 16/49
        assert r1[0] == pytest.approx(4 / 7, rel=1e-14)
        assert (5 * r1[0] ** 2 + 11 * r2[0] ** 2) / 16 == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("M,G,rho", [(16, 2, 0.5), (64, 4, 0.8), (256, 6, 0.3), (128, 5, 1.7)])
    def test_structure(self, M, G, rho):
        spec = SapskSpec(M, G, rho)
        c = make_sapsk(spec)
        check_invariants(c)
        assert abs(c.centroid) < 1e-12
        n = sapsk_populations(M, G)
        assert n.sum() == M
        assert np.min(np.abs(c.points)) == pytest.approx(np.abs(c.points[0]), rel=1e-15)
        start = 0
        radii = []
        for nk in n:
            ring = c.points[start:start + nk]
            start += nk
            radii.append(np.abs(ring[0]))
            ang = np.sort(np.mod(np.angle(ring), 2 * np.pi))
            gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
            np.testing.assert_allclose(gaps, 2 * np.pi / nk, atol=1e-12)
        assert np.all(np.diff(radii) > 0)

    def test_populations_proportional(self):
        n = sapsk_populations(256, 4)
        np.testing.assert_allclose(n / n.sum(), np.arange(1, 5) / 10, atol=1 / 256)

    def test_infeasible(self):
        with pytest.raises(ValueError, match="infeasible"):
            make_sapsk(SapskSpec(16, 5, 1.0))
        with pytest.raises(ValueError):
            SapskSpec(8, 9, 1.0)
        with pytest.raises(ValueError):
            SapskSpec(8, 2, 0.0)


class TestNormalize:
    def test_unchanged(self):
        c = normalize([1 + 0j, -1 + 0j])
        np.testing.assert_array_equal(c.points, [1, -1])

    def test_shift_and_scale(self):
        c = normalize([0, 2])
        np.testing.assert_allclose(c.points, [-1, 1], atol=1e-15)

    def test_random_cloud(self):
        rng = np.random.default_rng(5)
        pts = 3 + 2j + rng.standard_normal(64) + 1j * rng.standard_normal(64)
        c = normalize(pts)
        assert abs(np.sum(c.points)) <= 1e-12 * 64
        assert abs(c.energy - 1) <= 1e-12

    def test_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            normalize([1 + 1j, 1 + 1j, 1 + 1j])


class TestConstellationType:
    def test_rejects_origin(self):
        with pytest.raises(ValueError, match="origin"):
            Constellation(np.array([0, 1, -1]))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="distinct"):
            Constellation(np.array([1, 1, -1]))

    def test_rejects_single(self):
        with pytest.raises(ValueError):
            Constellation(np.array([1.0]))

    def test_immutable(self):
        c = make_qam(4)
        with pytest.raises(ValueError):
            c.points[0] = 3.0


class TestFileIO:
    def test_parse(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("1 0\n-1 0\n")
        c = load_constellation(p)
        np.testing.assert_array_equal(c.points, [1, -1])

    def test_comment(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("# header line\n1 0\n\n# mid\n-1 0\n")
        assert load_constellation(p).M == 2

    @pytest.mark.parametrize("M", [64, 128])
    def test_round_trip(self, tmp_path, M):
        c = make_qam(M)
        p = tmp_path / "q.txt"
        save_constellation(c, p, ["made by test"])
        d = load_constellation(p)
        np.testing.assert_array_equal(c.points, d.points)

    def test_round_trip_irrational(self, tmp_path):
        c = make_sapsk(SapskSpec(64, 4, 0.77))
        p = tmp_path / "s.txt"
        save_constellation(c, p)
        np.testing.assert_array_equal(load_constellation(p).points, c.points)

    def test_malformed_line_number(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("# c\n1 0\n1 2 3\n")
        with pytest.raises(ValueError, match=":3:"):
            load_constellation(p)
        p.write_text("1 0\nfoo bar\n")
        with pytest.raises(ValueError, match=":2:"):
            load_constellation(p)

    def test_too_few(self, tmp_path):
        p = tmp_path / "one.txt"
        p.write_text("1 0\n")
        with pytest.raises(ValueError, match="at least 2"):
            load_constellation(p)

    def test_parse_source(self, tmp_path):
        assert parse_source("qam:16").M == 16
        assert parse_source("sapsk:16:2:1.0").M == 16
        p = tmp_path / "x.txt"
        save_constellation(make_qam(4), p)
        assert parse_source(str(p)).M == 4
        with pytest.raises(ValueError):
            parse_source("qam:16:2")
