"""Mining software-development screencasts.

Frame-similarity screencast detection, LDA topic extraction over titles
and transcripts, and TF-IDF linking of transcripts to API reference pages.
Hot loops run in a Cython extension when it is built; see ``BACKEND``.
"""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .corpus import (  # noqa: E402
    Document,
    FrameSequence,
    VideoRecord,
    extract_api_doc_text,
    load_frames,
    load_transcript,
    load_video_manifest,
)
from .detect import VideoScore, evaluate_ranking, rank_videos, video_similarity  # noqa: E402
from .doclink import evaluate_links, link_transcript, threshold_partition  # noqa: E402
from .text import PreprocessOptions, preprocess_text  # noqa: E402
from .topics import intertopic_map, lda_fit, relevance_terms, tune_topics  # noqa: E402
from .vectorspace import (  # noqa: E402
    TermVector,
    cosine,
    jaccard,
    lsi_fit,
    lsi_similarity,
    quantize_frame,
    tfidf_build,
)
