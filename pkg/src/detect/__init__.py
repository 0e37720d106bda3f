from src.detect.detector import AnnotationDetector, Detector, detect, report_objects
