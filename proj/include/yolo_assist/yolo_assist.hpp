#pragma once

#include "yolo_assist/annotations.hpp"
#include "yolo_assist/detector.hpp"
#include "yolo_assist/error.hpp"
#include "yolo_assist/evaluation.hpp"
#include "yolo_assist/feedback.hpp"
#include "yolo_assist/image.hpp"
#include "yolo_assist/kernels.hpp"
#include "yolo_assist/model_config.hpp"
#include "yolo_assist/network.hpp"
#include "yolo_assist/postprocess.hpp"
#include "yolo_assist/tensor.hpp"
#include "yolo_assist/weights_io.hpp"
