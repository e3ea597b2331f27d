//! Blocking client for the stepcalc HTTP service.
//!
//! ```no_run
//! let client = stepcalc_client::Client::new("http://127.0.0.1:8080");
//! let sheet = client.create_from_fixture("cherries")?;
//! let ran = client.run(&sheet.id)?;
//! # Ok::<(), stepcalc_client::Error>(())
//! ```

use std::collections::{BTreeMap, BTreeSet};

use reqwest::blocking::Response;
use serde::de::DeserializeOwned;
use serde::Serialize;
use stepcalc::api::{
    ApiError, CheckProgram, CheckResponse, CreateWorksheet, FixtureSummary, FmtProgram, FmtResponse,
    RunProgram, SetCell, SolveProgram, SolveResponse, Symbolize, TraceResponse, WorksheetResponse,
    WorksheetSummary,
};
use stepcalc::worksheet::SessionEvent;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The service answered with an error body.
    #[error("{}", .body.message)]
    Api { status: u16, body: ApiError },
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("unexpected response ({status}): {text}")]
    Unexpected { status: u16, text: String },
}

impl Error {
    /// The service's error code, if the service produced the error.
    pub fn code(&self) -> Option<&str> {
        match self {
            Error::Api { body, .. } => Some(&body.code),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::blocking::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: &str) -> Self {
        Client {
            base: base.trim_end_matches('/').to_string(),
            http: reqwest::blocking::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn decode<T: DeserializeOwned>(res: Response) -> Result<T> {
        let status = res.status();
        let text = res.text()?;
        if status.is_success() {
            return serde_json::from_str(&text).map_err(|_| Error::Unexpected {
                status: status.as_u16(),
                text,
            });
        }
        match serde_json::from_str::<ApiError>(&text) {
            Ok(body) => Err(Error::Api {
                status: status.as_u16(),
                body,
            }),
            Err(_) => Err(Error::Unexpected {
                status: status.as_u16(),
                text,
            }),
        }
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T> {
        Self::decode(self.http.get(format!("{}{path}", self.base)).send()?)
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T> {
        Self::decode(self.http.post(format!("{}{path}", self.base)).json(body).send()?)
    }

    pub fn health(&self) -> Result<()> {
        let res = self.http.get(format!("{}/health", self.base)).send()?;
        if res.status().is_success() {
            Ok(())
        } else {
            Err(Error::Unexpected {
                status: res.status().as_u16(),
                text: res.text()?,
            })
        }
    }

    pub fn fixtures(&self) -> Result<Vec<FixtureSummary>> {
        self.get("/fixtures")
    }

    pub fn list(&self) -> Result<Vec<WorksheetSummary>> {
        self.get("/worksheets")
    }

    pub fn create(&self, req: &CreateWorksheet) -> Result<WorksheetResponse> {
        self.post("/worksheets", req)
    }

    pub fn create_from_source(&self, source: &str, title: &str) -> Result<WorksheetResponse> {
        self.create(&CreateWorksheet {
            source: Some(source.to_string()),
            title: Some(title.to_string()),
            ..Default::default()
        })
    }

    pub fn create_from_fixture(&self, name: &str) -> Result<WorksheetResponse> {
        self.create(&CreateWorksheet {
            fixture: Some(name.to_string()),
            ..Default::default()
        })
    }

    pub fn worksheet(&self, id: &str) -> Result<WorksheetResponse> {
        self.get(&format!("/worksheets/{id}"))
    }

    pub fn events(&self, id: &str) -> Result<Vec<SessionEvent>> {
        self.get(&format!("/worksheets/{id}/events"))
    }

    pub fn set_cell(&self, id: &str, cell: &str, content: &str, revision: Option<u64>) -> Result<WorksheetResponse> {
        let body = SetCell {
            content: content.to_string(),
            revision,
        };
        self.post(&format!("/worksheets/{id}/cells/{cell}"), &body)
    }

    pub fn symbolize(&self, id: &str, cell: &str, letter: Option<&str>) -> Result<WorksheetResponse> {
        let body = Symbolize {
            cell: cell.to_string(),
            letter: letter.map(str::to_string),
            revision: None,
        };
        self.post(&format!("/worksheets/{id}/symbolize"), &body)
    }

    pub fn run(&self, id: &str) -> Result<WorksheetResponse> {
        self.post(&format!("/worksheets/{id}/run"), &())
    }

    pub fn reset(&self, id: &str) -> Result<WorksheetResponse> {
        self.post(&format!("/worksheets/{id}/reset"), &())
    }

    pub fn run_program(&self, source: &str, overrides: &BTreeMap<String, String>) -> Result<TraceResponse> {
        let body = RunProgram {
            source: source.to_string(),
            overrides: overrides.clone(),
        };
        self.post("/programs/run", &body)
    }

    pub fn solve(&self, source: &str, symbolize: &BTreeSet<String>) -> Result<SolveResponse> {
        let body = SolveProgram {
            source: source.to_string(),
            symbolize: symbolize.clone(),
        };
        self.post("/programs/solve", &body)
    }

    pub fn check(&self, source: &str, trials: usize, seed: u64) -> Result<CheckResponse> {
        let body = CheckProgram {
            source: source.to_string(),
            trials,
            seed,
        };
        self.post("/programs/check", &body)
    }

    pub fn fmt(&self, source: &str) -> Result<String> {
        let body = FmtProgram {
            source: source.to_string(),
        };
        self.post::<_, FmtResponse>("/programs/fmt", &body).map(|r| r.source)
    }
}
