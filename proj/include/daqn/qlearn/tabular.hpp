#pragma once

#include <Eigen/Core>

namespace daqn {

/// Rows are states, columns actions.
using QTable = Eigen::MatrixXd;

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); the max term
/// is dropped when `terminal`.
void tabular_q_update(QTable& q, int s, int a, double r, int s_next, double alpha, double gamma, bool terminal);

}  // namespace daqn
