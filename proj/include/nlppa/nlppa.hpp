#ifndef NLPPA_NLPPA_HPP
#define NLPPA_NLPPA_HPP

#include "nlppa/block_matrix.hpp"
#include "nlppa/diagnostics.hpp"
#include "nlppa/errors.hpp"
#include "nlppa/linalg.hpp"
#include "nlppa/linear.hpp"
#include "nlppa/params.hpp"
#include "nlppa/pc_method.hpp"
#include "nlppa/problem.hpp"
#include "nlppa/qcqp.hpp"
#include "nlppa/qcqp_oracle.hpp"
#include "nlppa/relaxed_ppa.hpp"
#include "nlppa/sigma.hpp"
#include "nlppa/trace.hpp"

#endif // NLPPA_NLPPA_HPP
