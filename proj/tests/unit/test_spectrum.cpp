#include <gtest/gtest.h>

#include <cmath>

#include "rotbec/error.hpp"
#include "rotbec/spectrum.hpp"

using namespace rotbec;

namespace {
const RadialProfile& profile() { return default_townes().profile; }
}  // namespace

TEST(Spectrum, GroundStateSpansKernelOfL) {
  const SpectrumReport s = linearized_spectrum(profile(), LinearOp::L, 0, 3);
  EXPECT_NEAR(s.eigenvalues.front(), 0.0, 1e-4);
  EXPECT_GT(s.profile_cosine, 0.9999);
  // The remaining radial spectrum of L sits above the kernel.
  EXPECT_GT(s.eigenvalues[1], 0.1);
}

TEST(Spectrum, TranslationModesSpanKernelOfLhatInFirstSector) {
  // grad w is a zero mode of L_hat; its angular index is 1.
  const SpectrumReport s = linearized_spectrum(profile(), LinearOp::L_hat, 1, 2);
  EXPECT_NEAR(s.eigenvalues.front(), 0.0, 1e-4);
}

TEST(Spectrum, LhatHasOneNegativeDirection) {
  const SpectrumReport s = linearized_spectrum(profile(), LinearOp::L_hat, 0, 3);
  EXPECT_LE(s.eigenvalues[0], -3.9);
  EXPECT_GT(s.eigenvalues[1], -1e-4);
}

TEST(Spectrum, HigherSectorsArePositive) {
  for (int m : {2, 3}) {
    EXPECT_GT(linearized_spectrum(profile(), LinearOp::L, m, 1).eigenvalues.front(), 0.0);
    EXPECT_GT(linearized_spectrum(profile(), LinearOp::L_hat, m, 1).eigenvalues.front(), 0.0);
  }
}

TEST(Spectrum, EigenpairsHaveSmallResiduals) {
  for (LinearOp op : {LinearOp::L, LinearOp::L_hat}) {
    for (int m : {0, 1}) {
      const SpectrumReport s = linearized_spectrum(profile(), op, m, 3);
      ASSERT_EQ(s.residuals.size(), 3u);
      for (double r : s.residuals) EXPECT_LT(r, 1e-6);
      for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) EXPECT_LE(s.eigenvalues[k - 1], s.eigenvalues[k]);
    }
  }
}

TEST(Spectrum, RejectsBadArguments) {
  EXPECT_THROW((void)linearized_spectrum(profile(), LinearOp::L, -1, 1), ConfigError);
  EXPECT_THROW((void)linearized_spectrum(profile(), LinearOp::L, 0, 0), ConfigError);
  EXPECT_THROW((void)linearized_spectrum(profile(), LinearOp::L, 0, 1, 0.0), ConfigError);
}
