// Thin REST client for the session service.

import type { ReplyFrame, StateFrame, TranscriptEntry } from './types.js'

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail)
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  })
  const body = await response.json().catch(() => ({}))
  if (!response.ok) {
    const detail =
      typeof body?.detail === 'string' ? body.detail : `HTTP ${response.status}`
    throw new ApiError(response.status, detail)
  }
  return body as T
}

export interface SessionSnapshot extends Omit<StateFrame, 'type'> {
  transcript: TranscriptEntry[]
}

export function createSession(): Promise<{ id: string; state: string }> {
  return request('/session', { method: 'POST', body: JSON.stringify({}) })
}

export function fetchSession(id: string): Promise<SessionSnapshot> {
  return request(`/session/${id}`)
}

export function sendMessage(
  id: string,
  utterance: string,
): Promise<{ reply: ReplyFrame; state: string }> {
  return request(`/session/${id}/send`, {
    method: 'POST',
    body: JSON.stringify({ utterance }),
  })
}

export function selectObject(id: string, objectId: number): Promise<unknown> {
  return request(`/session/${id}/select`, {
    method: 'POST',
    body: JSON.stringify({ object_id: objectId }),
  })
}

export function approve(id: string): Promise<{ state: string }> {
  return request(`/session/${id}/approve`, { method: 'POST' })
}
