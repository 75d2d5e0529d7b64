// Copyright 2026 The Locus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Prints the mean raw default feature over a held-out synthetic scene as a
// comma-separated list suitable for src/feature_offset.inc.
#include <cstdio>
#include <cstdlib>

#include "locus/segment_features.hpp"
#include "locus/segmentation.hpp"
#include "locus/synthetic.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7919;
  const locus::SyntheticScene scene(locus::looped_benchmark_spec(), seed);
  const locus::DefaultExtractor raw(false);
  const locus::SegmentationConfig seg;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(locus::kFeatureDim);
  std::size_t count = 0;
  for (std::size_t i = 0; i < scene.size(); i += 5) {
    for (const auto& f : raw.extract(locus::segment_frame(scene.frame(i), seg))) {
      sum += f.values;
      ++count;
    }
  }
  if (count == 0) return 1;
  sum /= static_cast<double>(count);
  std::printf("// mean of %zu segment features, calibration seed %llu\n", count,
              static_cast<unsigned long long>(seed));
  for (Eigen::Index k = 0; k < sum.size(); ++k) {
    std::printf("%.17g%s", sum[k], k + 1 < sum.size() ? ((k + 1) % 4 ? ", " : ",\n") : "\n");
  }
}
