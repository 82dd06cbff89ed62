#include "tsvflab/settings.hpp"

namespace tsvf {

Tolerances& tolerances() {
  static Tolerances instance;
  return instance;
}

}  // namespace tsvf
