#include "scarlet/trainer.hpp"

namespace scarlet {

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0))
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be > 0");
  if (config.epochs == 0) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (!(config.init_sigma >= 0)) throw Error(ErrorCode::InvalidConfig, "init_sigma must be >= 0");
}

template class BasicToyEncoder<double>;

}  // namespace scarlet
