#include "ggev.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "channelstab/errors.hpp"

namespace cstab::detail {

GgevResult ggev(CMat A, CMat B, bool left, bool right) {
  const lapack_int n = lapack_int(A.rows());
  GgevResult r;
  r.alpha.resize(n);
  r.beta.resize(n);
  r.VL.resize(left ? n : 1, left ? n : 1);
  r.VR.resize(right ? n : 1, right ? n : 1);
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, left ? 'V' : 'N', right ? 'V' : 'N', n, A.data(), n,
                                        B.data(), n, r.alpha.data(), r.beta.data(), r.VL.data(),
                                        lapack_int(r.VL.rows()), r.VR.data(), lapack_int(r.VR.rows()));
  if (info != 0) throw Error(ErrorKind::Numeric, "zggev failed with info " + std::to_string(info), double(info));
  if (!left) r.VL.resize(0, 0);
  if (!right) r.VR.resize(0, 0);
  return r;
}

}  // namespace cstab::detail
