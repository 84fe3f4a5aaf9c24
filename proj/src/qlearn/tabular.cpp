#include "daqn/qlearn/tabular.hpp"

#include <stdexcept>

namespace daqn {

void tabular_q_update(QTable& q, int s, int a, double r, int s_next, double alpha, double gamma, bool terminal) {
  if (s < 0 || s >= q.rows() || a < 0 || a >= q.cols()) throw std::out_of_range("Q table index out of range");
  const double bootstrap = terminal ? 0.0 : q.row(s_next).maxCoeff();
  q(s, a) += alpha * (r + gamma * bootstrap - q(s, a));
}

}  // namespace daqn
