use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use storyrec_core::{Engine, SessionState};
use uuid::Uuid;

use crate::api::SessionSummary;

pub type SessionHandle = Arc<Mutex<SessionState>>;

/// Shared by all handlers. The engine is never mutated after startup; each
/// session sits behind its own lock so one session's requests run one at a
/// time while different sessions proceed in parallel.
#[derive(Clone)]
pub struct AppState {
    engine: Arc<Engine>,
    sessions: Arc<RwLock<HashMap<Uuid, SessionHandle>>>,
}

impl AppState {
    pub fn new(engine: Engine) -> Self {
        Self::from_arc(Arc::new(engine))
    }

    pub fn from_arc(engine: Arc<Engine>) -> Self {
        AppState {
            engine,
            sessions: Arc::default(),
        }
    }

    pub fn engine(&self) -> &Arc<Engine> {
        &self.engine
    }

    pub fn insert(&self, session: SessionState) -> (Uuid, SessionHandle) {
        let id = Uuid::new_v4();
        let handle = Arc::new(Mutex::new(session));
        self.sessions.write().insert(id, handle.clone());
        (id, handle)
    }

    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        let id = Uuid::parse_str(id).ok()?;
        self.sessions.read().get(&id).cloned()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().len()
    }
}

pub fn summarize(engine: &Engine, id: &str, s: &SessionState) -> SessionSummary {
    let ids = |set: &std::collections::BTreeSet<usize>| set.iter().map(|&i| engine.dataset().movie(i).id).collect();
    SessionSummary {
        session_id: id.to_string(),
        user_id: s.user_id,
        seed: s.seed,
        preferences: s.preferences().into(),
        thumbs_up: ids(&s.feedback().up),
        thumbs_down: ids(&s.feedback().down),
        stories_generated: s.stories_generated(),
        created_at: s.created_at,
        updated_at: s.updated_at,
    }
}
