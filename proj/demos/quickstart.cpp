// Minimal end-to-end walk: synthesize a small stereo corpus, train the three
// compensation techniques on one half, and print how far each one pulls the
// other half's shouted embeddings back toward their normal twins.

#include <cstdio>

#include "shoutcomp/shoutcomp.hpp"

using namespace shoutcomp;

namespace {

double mean_squared_error(const StereoPairs& pairs,
                          const std::vector<Vec>& estimates) {
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs.pairs[i];
    for (std::size_t d = 0; d < pair.normal.size(); ++d) {
      const double diff = estimates[i][d] - pair.normal[d];
      total += diff * diff;
    }
  }
  return total / double(pairs.size() * pairs.dim);
}

}  // namespace

int main() {
  SynthConfig config;
  config.n_speakers = 10;
  config.n_contents = 12;
  config.dim = 8;
  config.n_shift_clusters = 2;  // at this corpus size, more would leave gmm
                                // component pairs without training support
  const Dataset corpus = generate(config);

  // Odd/even speaker split: train on one half, probe on the other.
  Dataset train, probe;
  train.dim = probe.dim = corpus.dim;
  const auto speakers = corpus.speakers();
  for (const auto& record : corpus.records) {
    std::size_t rank = 0;
    while (speakers[rank] != record.speaker) ++rank;
    (rank % 2 == 0 ? train : probe).records.push_back(record);
  }

  const auto train_pairs = align_stereo(train);
  const auto probe_pairs = align_stereo(probe);
  std::printf("training pairs: %zu, probe pairs: %zu\n", train_pairs.size(),
              probe_pairs.size());

  const std::size_t k = 2;
  const auto normal_gmm = fit_em(detail::domain_vectors(train, Domain::Normal), k).gmm;
  const auto shouted_gmm = fit_em(detail::domain_vectors(train, Domain::Shouted), k).gmm;

  const auto ratz = train_ratz(train_pairs, normal_gmm);
  const auto splice = train_splice(train_pairs, shouted_gmm);
  const auto memlin = train_memlin(train_pairs, normal_gmm, shouted_gmm);

  std::vector<Vec> raw, ratz_hat, splice_hat, memlin_hat;
  for (const auto& pair : probe_pairs.pairs) {
    raw.push_back(pair.shouted);
    ratz_hat.push_back(apply_ratz(ratz, normal_gmm, pair.shouted));
    splice_hat.push_back(apply_splice(splice, shouted_gmm, pair.shouted));
    memlin_hat.push_back(apply_memlin(memlin, shouted_gmm, pair.shouted));
  }

  std::printf("mse vs normal twin, uncompensated: %.4f\n",
              mean_squared_error(probe_pairs, raw));
  std::printf("mse vs normal twin, ratz:          %.4f\n",
              mean_squared_error(probe_pairs, ratz_hat));
  std::printf("mse vs normal twin, splice:        %.4f\n",
              mean_squared_error(probe_pairs, splice_hat));
  std::printf("mse vs normal twin, memlin:        %.4f\n",
              mean_squared_error(probe_pairs, memlin_hat));

  const auto detector = train_detector(detail::domain_vectors(train, Domain::Shouted),
                                       detail::domain_vectors(train, Domain::Normal));
  std::size_t correct = 0;
  for (const auto& record : probe.records)
    if (classify(detector, record.vector) == record.domain) ++correct;
  std::printf("detector accuracy on held-out speakers: %zu/%zu\n", correct,
              probe.records.size());
  return 0;
}
