#pragma once

#include <string>
#include <vector>

#include "autolabel/dataset.hpp"
#include "autolabel/synth.hpp"

namespace fixtures {

// d=4, one shared label, vocabulary {a, b, c}, one source and one target video.
inline autolabel::DatasetBundle minimal_bundle() {
  using namespace autolabel;
  DatasetBundle b;
  b.dim = 4;
  b.shared_labels.push_back({"walk", {1.0f, 0.0f, 0.0f, 0.0f}});
  b.attribute_vocab = {"a", "b", "c"};
  b.attribute_embeddings = FloatMatrix(3, 4, {0.0f, 1.0f, 0.0f, 0.0f,  //
                                              0.0f, 0.0f, 1.0f, 0.0f,  //
                                              0.0f, 0.0f, 0.0f, 1.0f});
  b.video_embeddings = FloatMatrix(2, 4, {0.9f, 0.1f, 0.0f, 0.0f,  //
                                          0.1f, 0.0f, 0.9f, 0.0f});
  b.videos.push_back({"s0", Domain::Source, 0, {{0, 1}, {0}}, "walk"});
  b.videos.push_back({"t0", Domain::Target, 1, {{1, 2}}, std::nullopt});
  return b;
}

inline autolabel::SynthConfig clean_synth(std::size_t k, std::size_t m, std::size_t n, std::uint64_t seed) {
  autolabel::SynthConfig c;
  c.shared_classes = k;
  c.private_classes = m;
  c.videos_per_class = n;
  c.noise_sigma = 0.05;
  c.seed = seed;
  return c;
}

}  // namespace fixtures
