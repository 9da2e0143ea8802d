#include "umbilic/linalg.hpp"

namespace umbilic {

Eigen::VectorXd centred_singular_values(const Eigen::MatrixXd& points) {
    if (points.rows() == 0) return Eigen::VectorXd();
    const Eigen::RowVectorXd mean = points.colwise().mean();
    const Eigen::MatrixXd centred = points.rowwise() - mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
    return svd.singularValues();
}

}  // namespace umbilic
