#include "notears/matrix_exp.hpp"

#include <cmath>

#include "notears/errors.hpp"

namespace notears {

namespace {

double one_norm(const Mat& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade numerator/denominator split: returns e^A = (V - U)^-1 (V + U).
Mat pade_solve(const Mat& U, const Mat& V) {
  Eigen::PartialPivLU<Mat> lu(V - U);
  return lu.solve(V + U);
}

Mat pade_small(const Mat& A, const double* b, int m) {
  const int d = static_cast<int>(A.rows());
  const Mat I = Mat::Identity(d, d);
  const Mat A2 = A * A;
  Mat U = b[1] * I;
  Mat V = b[0] * I;
  Mat P = I;  // A^{2k}
  for (int k = 1; 2 * k <= m; ++k) {
    P = P * A2;
    U += b[2 * k + 1] * P;
    if (2 * k <= m) V += b[2 * k] * P;
  }
  U = A * U;
  return pade_solve(U, V);
}

Mat pade13(const Mat& A) {
  static const double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
  const int d = static_cast<int>(A.rows());
  const Mat I = Mat::Identity(d, d);
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  Mat U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 +
               b[1] * I);
  Mat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  return pade_solve(U, V);
}

}  // namespace

Mat matrix_exp(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw invalid_argument_error("matrix_exp: input must be square, d >= 1");
  if (!A.allFinite()) throw invalid_argument_error("matrix_exp: input has non-finite entries");

  static const double b3[4] = {120.0, 60.0, 12.0, 1.0};
  static const double b5[6] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static const double b7[8] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0,
                               1.0};
  static const double b9[10] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const double theta3 = 1.495585217958292e-2;
  const double theta5 = 2.539398330063230e-1;
  const double theta7 = 9.504178996162932e-1;
  const double theta9 = 2.097847961257068e0;
  const double theta13 = 5.371920351148152e0;

  const double nrm = one_norm(A);
  if (nrm <= theta3) return pade_small(A, b3, 3);
  if (nrm <= theta5) return pade_small(A, b5, 5);
  if (nrm <= theta7) return pade_small(A, b7, 7);
  if (nrm <= theta9) return pade_small(A, b9, 9);

  int s = 0;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  Mat E = pade13(A / std::pow(2.0, s));
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

}  // namespace notears
