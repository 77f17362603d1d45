"""Smoke tests for the python bindings (run against the CMake-built module)."""

import math
import unittest

import _klab as k


class SmokeTest(unittest.TestCase):
    def test_prime_context_and_kloosterman(self):
        ctx = k.PrimeContext(101)
        self.assertEqual(ctx.q, 101)
        self.assertEqual((ctx.inv(3) * 3) % 101, 1)
        kl = k.kloosterman_all(ctx)
        self.assertEqual(len(kl), 101)
        self.assertAlmostEqual(kl[7], k.kloosterman(7, ctx), places=10)
        self.assertTrue(all(abs(v) <= 2.0 + 1e-9 for v in kl[1:]))
        self.assertAlmostEqual(
            k.kloosterman(1, k.PrimeContext(2)), 1 / math.sqrt(2), places=12
        )

    def test_composite_modulus_raises(self):
        with self.assertRaises(k.KlabError):
            k.PrimeContext(6)

    def test_lemma_and_transforms(self):
        ctx = k.PrimeContext(17)
        self.assertLess(k.verify_kloosterman_lemma(ctx, 3), 1e-10)
        K = k.kloosterman_function(ctx, 1)
        chk = k.voronoi_transform(K, ctx)
        peak = 16 / math.sqrt(17)
        self.assertAlmostEqual(chk.values[1].real, peak, places=9)

    def test_weights(self):
        w = k.make_bump(1.0)
        self.assertEqual(w(1.0), 1.0)
        self.assertEqual(w(3.0), 0.0)
        self.assertAlmostEqual(w.mass, 1.0, places=12)
        self.assertLessEqual(abs(w.fourier(9.0)), w.fourier_bound(9.0) + 1e-12)

    def test_hecke_data(self):
        hd = k.delta_coefficients(100)
        self.assertEqual(hd.tau(2), "-24")
        self.assertEqual(hd.tau(3), "252")
        self.assertEqual(hd.eps, 1)
        self.assertLessEqual(abs(hd.lam(30)), 8.0)

    def test_bilinear_report(self):
        ctx = k.PrimeContext(211)
        rep = k.bilinear_smooth(ctx, 1, 16.0, 16.0)
        self.assertIn("predicted", rep["ratios"])
        self.assertLess(rep["ratios"]["predicted"], 10.0)

    def test_certificates(self):
        self.assertGreaterEqual(k.eta_case_certificate(1.0, 0.0), -1e-9)
        c = k.moment_exponent_certificate(1.0 / 20.0)
        self.assertTrue(c["pass"])
        bad = k.moment_exponent_certificate(1.0 / 10.0)
        self.assertFalse(bad["pass"])

    def test_l_values(self):
        ctx = k.PrimeContext(13)
        for j in range(1, 12):
            diff = abs(k.l_half(ctx, j, "oracle") - k.l_half(ctx, j, "afe"))
            self.assertLess(diff, 1e-6)
        self.assertGreater(k.fourth_moment(ctx), 0.0)

    def test_hb_identity(self):
        self.assertLess(k.hb_lambda_check(2, 3000), 1e-9)


if __name__ == "__main__":
    unittest.main()
