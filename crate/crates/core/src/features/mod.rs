//! Feature encoders: bag-of-words counts, TF-IDF, mean-pooled skip-gram
//! embeddings, externally computed document embeddings, and horizontal
//! concatenations of any of them.
//!
//! Every encoder is fit once on training sequences and then applied to any
//! number of documents without changing its fitted state.

mod encoder;
mod external;
mod matrix;
mod vocab;
mod word2vec;

pub use encoder::{fit_encoder, transform_spec, BaseEncoder, EncoderSettings, EncoderSpec, FittedEncoder};
pub use external::{align_external, align_external_ids, load_external_embeddings, EmbeddingMeta, ExternalEmbeddingSet};
pub use matrix::{concat_features, FeatureMatrix, RowView, Rows, SparseRow};
pub use vocab::{encode_counts, encode_tfidf, fit_idf, fit_vocab, smoothed_idf, IdfTable, Vocabulary};
pub use word2vec::{encode_mean_embedding, train_word_embeddings, EmbeddingTable, Word2VecParams};
